#ifndef NETPSY_CLI_HPP
#define NETPSY_CLI_HPP

namespace netpsy {

inline constexpr const char* kVersion = "0.1.0";

// Batch front end: netpsy <command> --config run.json [--seed N]
// [--output-dir DIR]. Flags override the corresponding config keys. Every
// run writes its artifacts plus a manifest (config echo, seed, versions,
// input checksums) into the output directory; reruns with identical config
// and inputs are byte-identical. Exit codes: 0 success, 2 validation
// error, 3 numeric error; errors are reported as JSON on stderr.
int run_cli(int argc, char** argv);

}  // namespace netpsy

#endif

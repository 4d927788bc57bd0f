#include "netpsy/cli.hpp"

int main(int argc, char** argv) { return netpsy::run_cli(argc, argv); }

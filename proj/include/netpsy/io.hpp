#ifndef NETPSY_IO_HPP
#define NETPSY_IO_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "netpsy/ising.hpp"
#include "netpsy/recurrence.hpp"

namespace netpsy {

// Round-trip-exact decimal rendering of a double (17 significant digits).
std::string format_double(double v);

// Dense matrix as comma-separated rows, one row per line.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Pmf as CSV with columns config,bits,probability. `bits` spells item 0
// first; configuration indices follow the canonical bit order.
void write_pmf_csv(const std::string& path, const Pmf& pmf);

// Ising parameters as JSON ({mu, sigma, coding}).
std::string ising_params_to_json(const IsingParams& params);
IsingParams ising_params_from_json(const std::string& text);
void save_ising_params(const IsingParams& params, const std::string& path);
IsingParams load_ising_params(const std::string& path);

// Weighted networks in GraphML and DOT. Edges with |weight| <= threshold
// are omitted. Undirected writers read the upper triangle; directed
// writers emit edge source -> target for weight(target, source) != 0,
// matching the row-on-column regression convention. An optional parallel
// matrix of labels tags each edge with a level attribute.
void write_graphml_undirected(const std::string& path, const Eigen::MatrixXd& weights,
                              const std::vector<std::string>& names,
                              double threshold = 0.0);
void write_graphml_directed(const std::string& path, const Eigen::MatrixXd& weights,
                            const std::vector<std::string>& names,
                            double threshold = 0.0,
                            const std::vector<std::vector<std::string>>* levels = nullptr);
void write_dot_undirected(const std::string& path, const Eigen::MatrixXd& weights,
                          const std::vector<std::string>& names,
                          double threshold = 0.0);
void write_dot_directed(const std::string& path, const Eigen::MatrixXd& weights,
                        const std::vector<std::string>& names,
                        double threshold = 0.0);

// Unweighted graph (e.g. a recurrence network) in GraphML.
void write_graphml_graph(const std::string& path, const Graph& g);

// Recurrence plot as a portable bitmap (P1); recurrence points are black.
void write_pbm(const std::string& path, const RecurrenceMatrix& rm);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace netpsy

#endif

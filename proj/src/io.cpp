#include "netpsy/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netpsy/errors.hpp"

namespace netpsy {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  return out;
}

// Minimal XML attribute escaping for node names.
std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> default_names(Eigen::Index p) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < p; ++i) names.push_back("v" + std::to_string(i));
  return names;
}

void check_names(const Eigen::MatrixXd& weights, std::vector<std::string>& names) {
  if (weights.rows() != weights.cols())
    fail(Errc::dimension_mismatch, "weight matrix must be square");
  if (names.empty()) names = default_names(weights.rows());
  if (static_cast<Eigen::Index>(names.size()) != weights.rows())
    fail(Errc::dimension_mismatch, "one name per node required");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end != begin + cell.size())
        fail(Errc::non_numeric_cell,
             "line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(Errc::dimension_mismatch, "ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Errc::io_error, "'" + path + "' has no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

void write_pmf_csv(const std::string& path, const Pmf& pmf) {
  auto out = open_out(path);
  out << "config,bits,probability\n";
  for (Eigen::Index k = 0; k < pmf.probs.size(); ++k) {
    std::string bits(pmf.p, '0');
    for (int i = 0; i < pmf.p; ++i)
      if ((static_cast<std::uint32_t>(k) >> i) & 1u) bits[i] = '1';
    out << k << ',' << bits << ',' << format_double(pmf.probs(k)) << '\n';
  }
}

std::string ising_params_to_json(const IsingParams& params) {
  params.validate();
  json j;
  j["coding"] = coding_name(params.coding);
  j["mu"] = std::vector<double>(params.mu.data(), params.mu.data() + params.mu.size());
  json sigma = json::array();
  for (Eigen::Index r = 0; r < params.sigma.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < params.sigma.cols(); ++c)
      row.push_back(params.sigma(r, c));
    sigma.push_back(std::move(row));
  }
  j["sigma"] = std::move(sigma);
  return j.dump(2);
}

IsingParams ising_params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("invalid parameter JSON: ") + e.what());
  }
  IsingParams params;
  try {
    params.coding = coding_from_name(j.at("coding").get<std::string>());
    const auto mu = j.at("mu").get<std::vector<double>>();
    params.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(),
                                                  static_cast<Eigen::Index>(mu.size()));
    const auto& sigma = j.at("sigma");
    params.sigma.resize(static_cast<Eigen::Index>(sigma.size()),
                        static_cast<Eigen::Index>(sigma.size()));
    for (Eigen::Index r = 0; r < params.sigma.rows(); ++r) {
      const auto& row = sigma[static_cast<std::size_t>(r)];
      if (row.size() != sigma.size())
        fail(Errc::dimension_mismatch, "sigma must be square");
      for (Eigen::Index c = 0; c < params.sigma.cols(); ++c)
        params.sigma(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("invalid parameter JSON: ") + e.what());
  }
  params.validate();
  return params;
}

void save_ising_params(const IsingParams& params, const std::string& path) {
  auto out = open_out(path);
  out << ising_params_to_json(params) << '\n';
}

IsingParams load_ising_params(const std::string& path) {
  return ising_params_from_json(read_text_file(path));
}

void write_graphml_undirected(const std::string& path, const Eigen::MatrixXd& weights,
                              const std::vector<std::string>& names_in,
                              double threshold) {
  std::vector<std::string> names = names_in;
  check_names(weights, names);
  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < names.size(); ++i)
    out << "    <node id=\"n" << i << "\"><data key=\"label\">"
        << xml_escape(names[i]) << "</data></node>\n";
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = i + 1; j < weights.cols(); ++j)
      if (std::abs(weights(i, j)) > threshold)
        out << "    <edge source=\"n" << i << "\" target=\"n" << j
            << "\"><data key=\"weight\">" << format_double(weights(i, j))
            << "</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
}

void write_graphml_directed(const std::string& path, const Eigen::MatrixXd& weights,
                            const std::vector<std::string>& names_in, double threshold,
                            const std::vector<std::vector<std::string>>* levels) {
  std::vector<std::string> names = names_in;
  check_names(weights, names);
  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
  if (levels)
    out << "  <key id=\"level\" for=\"edge\" attr.name=\"level\" attr.type=\"string\"/>\n";
  out << "  <graph edgedefault=\"directed\">\n";
  for (std::size_t i = 0; i < names.size(); ++i)
    out << "    <node id=\"n" << i << "\"><data key=\"label\">"
        << xml_escape(names[i]) << "</data></node>\n";
  // weights(target, source): edge drawn source -> target.
  for (Eigen::Index tgt = 0; tgt < weights.rows(); ++tgt)
    for (Eigen::Index src = 0; src < weights.cols(); ++src)
      if (std::abs(weights(tgt, src)) > threshold) {
        out << "    <edge source=\"n" << src << "\" target=\"n" << tgt
            << "\"><data key=\"weight\">" << format_double(weights(tgt, src))
            << "</data>";
        if (levels)
          out << "<data key=\"level\">"
              << xml_escape((*levels)[static_cast<std::size_t>(tgt)]
                                     [static_cast<std::size_t>(src)])
              << "</data>";
        out << "</edge>\n";
      }
  out << "  </graph>\n</graphml>\n";
}

void write_dot_undirected(const std::string& path, const Eigen::MatrixXd& weights,
                          const std::vector<std::string>& names_in, double threshold) {
  std::vector<std::string> names = names_in;
  check_names(weights, names);
  auto out = open_out(path);
  out << "graph G {\n";
  for (std::size_t i = 0; i < names.size(); ++i)
    out << "  n" << i << " [label=\"" << dot_escape(names[i]) << "\"];\n";
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = i + 1; j < weights.cols(); ++j)
      if (std::abs(weights(i, j)) > threshold)
        out << "  n" << i << " -- n" << j << " [weight=\""
            << format_double(weights(i, j)) << "\"];\n";
  out << "}\n";
}

void write_dot_directed(const std::string& path, const Eigen::MatrixXd& weights,
                        const std::vector<std::string>& names_in, double threshold) {
  std::vector<std::string> names = names_in;
  check_names(weights, names);
  auto out = open_out(path);
  out << "digraph G {\n";
  for (std::size_t i = 0; i < names.size(); ++i)
    out << "  n" << i << " [label=\"" << dot_escape(names[i]) << "\"];\n";
  for (Eigen::Index tgt = 0; tgt < weights.rows(); ++tgt)
    for (Eigen::Index src = 0; src < weights.cols(); ++src)
      if (std::abs(weights(tgt, src)) > threshold)
        out << "  n" << src << " -> n" << tgt << " [weight=\""
            << format_double(weights(tgt, src)) << "\"];\n";
  out << "}\n";
}

void write_graphml_graph(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <graph edgedefault=\"undirected\">\n";
  for (int i = 0; i < g.n; ++i) out << "    <node id=\"n" << i << "\"/>\n";
  for (int v = 0; v < g.n; ++v)
    for (int w : g.adj[v])
      if (w > v)
        out << "    <edge source=\"n" << v << "\" target=\"n" << w << "\"/>\n";
  out << "  </graph>\n</graphml>\n";
}

void write_pbm(const std::string& path, const RecurrenceMatrix& rm) {
  auto out = open_out(path);
  const int t = rm.t();
  out << "P1\n" << t << ' ' << t << '\n';
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      if (b > 0) out << ' ';
      out << (rm.r(a, b) ? '1' : '0');
    }
    out << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

}  // namespace netpsy

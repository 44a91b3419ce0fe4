#include "fracseg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fracseg/la_operator.hpp"

namespace fracseg {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double col_angle(const LogPolarGrid& g, int jj) {
  if (jj == 0) return 0.0;
  if (jj == g.n_theta() + 1) return M_PI;
  return g.theta_node(jj - 1);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_snapshot(const std::string& path, const LogPolarField& f, FracParam par) {
  auto os = open_out(path);
  const auto& g = f.grid();
  os << fmt_double(par.s) << ' ' << fmt_double(par.a) << ' ' << fmt_double(g.t_min())
     << ' ' << fmt_double(g.t_max()) << ' ' << g.n_t() << ' ' << g.n_theta() << '\n';
  for (int i = 0; i < g.n_t(); ++i)
    for (int jj = 0; jj < g.n_cols(); ++jj)
      os << fmt_double(g.t_node(i)) << ' ' << fmt_double(col_angle(g, jj)) << ' '
         << fmt_double(f.at(i, jj)) << '\n';
}

LogPolarField read_snapshot(const std::string& path, FracParam& par_out) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path);
  double s, a, t_min, t_max;
  int n_t, n_theta;
  if (!(is >> s >> a >> t_min >> t_max >> n_t >> n_theta))
    throw std::runtime_error("snapshot header malformed: " + path);
  par_out = make_params(s);
  GridPtr g = build_grid(t_min, t_max, n_t, n_theta, par_out);
  LogPolarField f(g);
  for (int i = 0; i < n_t; ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      double t, th, v;
      if (!(is >> t >> th >> v))
        throw std::runtime_error("snapshot body truncated: " + path);
      f.at(i, jj) = v;
    }
  return f;
}

void write_field_csv(const std::string& path, const LogPolarField& f) {
  auto os = open_out(path);
  const auto& g = f.grid();
  os << "t,theta,value\n";
  for (int i = 0; i < g.n_t(); ++i)
    for (int jj = 0; jj < g.n_cols(); ++jj)
      os << fmt_double(g.t_node(i)) << ',' << fmt_double(col_angle(g, jj)) << ','
         << fmt_double(f.at(i, jj)) << '\n';
}

void write_eigenset_csv(const std::string& path, const EigenSet& set) {
  auto os = open_out(path);
  os << "j,lambda,theta,psi\n";
  for (size_t k = 0; k < set.lambda.size(); ++k)
    for (int j = 0; j < set.rule.size(); ++j)
      os << (k + 1) << ',' << fmt_double(set.lambda[k]) << ','
         << fmt_double(set.rule.nodes[j]) << ',' << fmt_double(set.psi[k][j]) << '\n';
}

void write_trace_csv(const std::string& path, const FrequencyTrace& trace) {
  auto os = open_out(path);
  os << "r,E,H,N,pohozaev,J\n";
  for (size_t k = 0; k < trace.r.size(); ++k) {
    os << fmt_double(trace.r[k]) << ',' << fmt_double(trace.E[k]) << ','
       << fmt_double(trace.H[k]) << ',' << fmt_double(trace.N[k]) << ','
       << fmt_double(trace.pohozaev[k]) << ',';
    os << (k < trace.J.size() ? fmt_double(trace.J[k]) : "") << '\n';
  }
}

void write_stencil(const std::string& path, const DiscreteOperator& op) {
  auto os = open_out(path);
  op.dump_stencil(os);
}

KVConfig KVConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str());
}

KVConfig KVConfig::parse_string(const std::string& text) {
  KVConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.kv_[key] = val;
  }
  return cfg;
}

std::string KVConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KVConfig::get_num(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("config: malformed number for " + key);
  return v;
}

int KVConfig::get_int(const std::string& key, int fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  size_t pos = 0;
  const int v = std::stoi(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("config: malformed integer for " + key);
  return v;
}

std::vector<double> KVConfig::get_list(const std::string& key,
                                       const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::istringstream is(it->second);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

}  // namespace fracseg

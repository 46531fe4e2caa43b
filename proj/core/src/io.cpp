#include "qse/io.hpp"

#include "qse/errors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace qse {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::int64_t parse_count_token(const std::string& tok, std::size_t line) {
  if (tok.empty()) throw ParseError("empty token", line);
  std::size_t i = 0;
  if (tok[0] == '+') i = 1;
  if (tok[0] == '-') throw ParseError("negative count '" + tok + "'", line);
  if (i == tok.size()) throw ParseError("malformed count '" + tok + "'", line);
  std::int64_t v = 0;
  for (; i < tok.size(); ++i) {
    const char c = tok[i];
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("count '" + tok + "' is not a nonnegative integer", line);
    }
    if (v > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10) {
      throw ParseError("count '" + tok + "' is too large", line);
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

char separator(TableFormat f) { return f == TableFormat::csv ? ',' : '\t'; }

void write_row(std::ostream& out, char sep, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << sep;
    out << cells[i];
  }
  out << '\n';
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h{
      "lambda",   "mean_fidelity",  "mean_bures_sq", "std_bures_sq",  "cov_trace",
      "bound",    "mean_half_bures_sq", "half_bound", "mean_infidelity", "trials",
      "failures", "not_converged",  "rank_matches",  "cov_samples"};
  return h;
}

std::vector<std::string> sweep_cells(const SweepPoint& p) {
  return {num(p.lambda),
          num(p.mean_fidelity),
          num(p.mean_bures_sq),
          num(p.std_bures_sq),
          num(p.cov_trace),
          num(p.bound),
          num(0.5 * p.mean_bures_sq),
          num(0.5 * p.bound),
          num(p.mean_infidelity),
          std::to_string(p.trials),
          std::to_string(p.failures),
          std::to_string(p.not_converged),
          std::to_string(p.rank_matches),
          std::to_string(p.cov_samples)};
}

}  // namespace

CountVector parse_counts(std::istream& in) {
  CountVector c;
  std::size_t found = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const std::int64_t v = parse_count_token(tok, line_no);
      if (found == 16) throw ParseError("more than 16 counts", line_no);
      c.n[found++] = v;
    }
  }
  if (found != 16) {
    throw ParseError("expected 16 counts, found " + std::to_string(found), std::max<std::size_t>(line_no, 1));
  }
  return c;
}

CountVector parse_counts_string(const std::string& text) {
  std::istringstream in(text);
  return parse_counts(in);
}

CountVector read_counts(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_counts(in);
}

void write_counts(std::ostream& out, const CountVector& counts) {
  for (std::size_t i = 0; i < 16; ++i) out << counts.n[i] << (i % 4 == 3 ? '\n' : ' ');
}

void write_counts(const std::string& path, const CountVector& counts) {
  std::ofstream out = open_out(path);
  write_counts(out, counts);
}

TableFormat table_format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".tsv") return TableFormat::tsv;
  return TableFormat::csv;
}

void write_sweep(std::ostream& out, const SweepResult& result, TableFormat format) {
  const char sep = separator(format);
  write_row(out, sep, sweep_header());
  for (const auto& p : result.points) write_row(out, sep, sweep_cells(p));
}

void write_sweep(const std::string& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  write_sweep(out, result, table_format_from_path(path));
}

void write_comparison(std::ostream& out, const BasisComparison& cmp, TableFormat format) {
  const char sep = separator(format);
  std::vector<std::string> header{"basis", "coefficient"};
  header.insert(header.end(), sweep_header().begin(), sweep_header().end());
  write_row(out, sep, header);
  for (const auto* s : {&cmp.local, &cmp.inseparable}) {
    for (const auto& p : s->points) {
      std::vector<std::string> cells{s->bound.set_name, num(s->bound.coefficient)};
      const auto rest = sweep_cells(p);
      cells.insert(cells.end(), rest.begin(), rest.end());
      write_row(out, sep, cells);
    }
  }
}

void write_comparison(const std::string& path, const BasisComparison& cmp) {
  std::ofstream out = open_out(path);
  write_comparison(out, cmp, table_format_from_path(path));
}

void write_matrix(std::ostream& out, const MatrixXd& m, TableFormat format) {
  const char sep = separator(format);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<std::string> cells;
    for (Eigen::Index c = 0; c < m.cols(); ++c) cells.push_back(num(m(r, c)));
    write_row(out, sep, cells);
  }
}

SimulationConfig parse_config_json(const std::string& text, SimulationConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "true_state") {
        base.true_state = value.get<std::string>();
      } else if (key == "rate") {
        base.rate = value.get<double>();
      } else if (key == "acquisition_times") {
        base.acquisition_times = value.get<std::vector<double>>();
      } else if (key == "trials") {
        base.trials = value.get<int>();
      } else if (key == "estimator") {
        base.estimator = estimator_from_name(value.get<std::string>());
      } else if (key == "basis") {
        base.basis = value.get<std::string>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "epsilon") {
        if (value.is_null())
          base.epsilon.reset();
        else
          base.epsilon = value.get<double>();
      } else if (key == "bound_rank") {
        if (value.is_null())
          base.bound_rank.reset();
        else
          base.bound_rank = value.get<int>();
      } else if (key == "threads") {
        base.threads = value.get<unsigned>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
  }
  base.validate();
  return base;
}

SimulationConfig read_config(const std::string& path, SimulationConfig base) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str(), std::move(base));
}

}  // namespace qse

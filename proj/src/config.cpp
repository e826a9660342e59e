#include "fockflow/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "fockflow/error.hpp"
#include "fockflow/spectra.hpp"

namespace fockflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InputError("invalid number '" + std::string(s) + "'");
  return v;
}

template <class T>
T parse_unsigned(std::string_view s) {
  s = trim(s);
  T v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InputError("invalid nonnegative integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw InputError("empty complex number");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  s.remove_suffix(1);
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    if (s.empty() || s == "+") return {0.0, 1.0};
    if (s == "-") return {0.0, -1.0};
    return {0.0, parse_double(s)};
  }
  std::string_view im = s.substr(split);
  double imag = im == "+" ? 1.0 : im == "-" ? -1.0 : parse_double(im[0] == '+' ? im.substr(1) : im);
  return {parse_double(s.substr(0, split)), imag};
}

std::vector<Complex> parse_complex_list(std::string_view text) {
  std::vector<Complex> out;
  for (auto part : split_commas(text)) out.push_back(parse_complex(part));
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_commas(text)) out.push_back(parse_double(part));
  return out;
}

void apply_setting(RunConfig& c, std::string_view section, std::string_view key, std::string_view value) {
  const std::string id = std::string(section) + "." + std::string(key);
  value = trim(value);
  if (id == "problem.polynomial") c.polynomial = std::string(value);
  else if (id == "problem.cutoff") c.cutoff = parse_unsigned<unsigned>(value);
  else if (id == "problem.alphas") c.alphas = parse_complex_list(value);
  else if (id == "problem.bound") c.bound = parse_unsigned<unsigned>(value);
  else if (id == "schedule.kind") c.schedule = std::string(value);
  else if (id == "flow.levels") c.levels = parse_unsigned<std::size_t>(value);
  else if (id == "flow.epsilon_start") c.epsilon_start = parse_double(value);
  else if (id == "flow.end_s") c.end_s = parse_double(value);
  else if (id == "flow.rel_tol") c.rel_tol = parse_double(value);
  else if (id == "flow.abs_tol") c.abs_tol = parse_double(value);
  else if (id == "flow.closure") c.closure = std::string(value);
  else if (id == "scan.grid") c.grid = parse_double_list(value);
  else if (id == "scan.points") c.points = parse_unsigned<std::size_t>(value);
  else if (id == "scan.pair") c.pair = parse_unsigned<std::size_t>(value);
  else if (id == "dynamics.times") c.times = parse_double_list(value);
  else if (id == "dynamics.num_slices") c.num_slices = parse_unsigned<std::size_t>(value);
  else if (id == "decide.levels") c.decide_levels = parse_unsigned<std::size_t>(value);
  else if (id == "decide.dynamics_time") c.decide_time = parse_double(value);
  else if (id == "output.directory") c.directory = std::string(value);
  else if (id == "output.seed") c.seed = parse_unsigned<std::uint64_t>(value);
  else throw InputError("unknown config key '" + id + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError("line " + std::to_string(line_no) + ": unterminated section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw InputError("line " + std::to_string(line_no) + ": key outside any section");
    apply_setting(c, section, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "[problem]\n";
  o << "polynomial = " << c.polynomial << "\n";
  o << "cutoff = " << c.cutoff << "\n";
  o << "alphas = ";
  for (std::size_t i = 0; i < c.alphas.size(); ++i) o << (i ? ", " : "") << format_complex(c.alphas[i]);
  o << "\nbound = " << c.bound << "\n";
  o << "\n[schedule]\nkind = " << c.schedule << "\n";
  o << "\n[flow]\n";
  o << "levels = " << c.levels << "\n";
  o << "epsilon_start = " << fmt(c.epsilon_start) << "\n";
  o << "end_s = " << fmt(c.end_s) << "\n";
  o << "rel_tol = " << fmt(c.rel_tol) << "\n";
  o << "abs_tol = " << fmt(c.abs_tol) << "\n";
  o << "closure = " << c.closure << "\n";
  o << "\n[scan]\n";
  o << "grid = " << join(c.grid) << "\n";
  o << "points = " << c.points << "\n";
  o << "pair = " << c.pair << "\n";
  o << "\n[dynamics]\n";
  o << "times = " << join(c.times) << "\n";
  o << "num_slices = " << c.num_slices << "\n";
  o << "\n[decide]\n";
  o << "levels = " << c.decide_levels << "\n";
  o << "dynamics_time = " << fmt(c.decide_time) << "\n";
  o << "\n[output]\n";
  o << "directory = " << c.directory << "\n";
  o << "seed = " << c.seed << "\n";
  return o.str();
}

std::vector<Complex> resolve_alphas(const RunConfig& c, std::size_t modes) {
  if (c.alphas.empty()) return default_alphas(modes);
  if (c.alphas.size() == 1) return spread_alpha(c.alphas.front(), modes);
  if (c.alphas.size() != modes)
    throw InputError("got " + std::to_string(c.alphas.size()) + " displacements for " + std::to_string(modes) +
                     " variables");
  return c.alphas;
}

std::vector<double> resolve_grid(const RunConfig& c) { return c.grid.empty() ? interior_grid(c.points) : c.grid; }

FlowConfig make_flow_config(const RunConfig& c) {
  FlowConfig f;
  f.levels = c.levels;
  f.epsilon_start = c.epsilon_start;
  f.end_s = c.end_s;
  f.rel_tol = c.rel_tol;
  f.abs_tol = c.abs_tol;
  f.schedule = Schedule::parse(c.schedule);
  f.closure = parse_closure(c.closure);
  return f;
}

DecisionConfig make_decision_config(const RunConfig& c) {
  DecisionConfig d;
  d.cutoff = c.cutoff;
  d.flow = make_flow_config(c);
  d.flow.levels = c.decide_levels;
  d.scan_points = c.points;
  d.dynamics_time = c.decide_time;
  d.dynamics_slices = c.num_slices;
  return d;
}

}  // namespace fockflow

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "lde/error.hpp"
#include "lde/model.hpp"

namespace lde {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw InvalidArgument("model file line " + std::to_string(line) + ": " + msg);
}

double to_number(std::string_view s, int line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> to_list(std::string_view s, int line) {
  std::vector<double> out;
  std::string buf(s);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream is(buf);
  std::string tok;
  while (is >> tok) out.push_back(to_number(tok, line));
  if (out.empty()) fail(line, "empty list");
  return out;
}

// Strips a trailing comment that is not inside double quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct Entry {
  std::string value;
  int line;
};

}  // namespace

Model parse_model_config(std::string_view text) {
  static const std::vector<std::string> keys{"name", "g", "kappa", "beta", "smoothing", "params"};
  std::map<std::string, Entry> kv;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(strip_comment(text.substr(pos, nl - pos)));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(line_no, "unknown key '" + key + "' (keys: name, g, kappa, beta, smoothing, params)");
    }
    if (kv.count(key)) fail(line_no, "duplicate key '" + key + "'");
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail(line_no, "unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    kv[key] = Entry{std::string(value), line_no};
  }

  std::optional<std::vector<double>> kappa, beta;
  if (kv.count("kappa")) kappa = to_list(kv["kappa"].value, kv["kappa"].line);
  if (kv.count("beta")) beta = to_list(kv["beta"].value, kv["beta"].line);
  std::optional<double> smoothing;
  if (kv.count("smoothing")) smoothing = to_number(kv["smoothing"].value, kv["smoothing"].line);

  Params params;
  if (kv.count("params")) {
    const Entry& e = kv["params"];
    std::string buf = e.value;
    std::replace(buf.begin(), buf.end(), ',', ' ');
    std::istringstream is(buf);
    std::string tok;
    while (is >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) fail(e.line, "params entries must be key=value");
      params[tok.substr(0, eq)] = to_number(std::string_view(tok).substr(eq + 1), e.line);
    }
  }

  if (kv.count("g")) {
    const Entry& e = kv["g"];
    if (!params.empty()) fail(kv["params"].line, "params apply to catalog models only");
    expr::Expr ex = [&] {
      try {
        return expr::Expr::parse(e.value);
      } catch (const expr::ParseError& err) {
        fail(e.line, std::string("in g: ") + err.what());
      }
    }();
    if (!kappa) {
      kappa = std::vector<double>(static_cast<std::size_t>(std::max(1, ex.max_variable())), 1.0);
    }
    const double sm = smoothing.value_or(0.0);
    auto g = std::make_shared<ExprFeedback>(std::move(ex), kappa->size() + 1, sm);
    const std::string name = kv.count("name") ? kv["name"].value : "expr";
    return make_model(name, *kappa, std::move(g), beta, sm);
  }

  if (!kv.count("name")) throw InvalidArgument("model file needs either 'g' or a catalog 'name'");
  if (smoothing && !params.count("eps")) params["eps"] = *smoothing;
  Model m = catalog(kv["name"].value, params);
  if (kappa) {
    if (kappa->size() != m.kappa.size()) {
      fail(kv["kappa"].line, "catalog model '" + kv["name"].value + "' has " +
                                 std::to_string(m.kappa.size()) + " delays");
    }
    m.kappa = *kappa;
  }
  if (beta) m.beta = beta;
  validate(m);
  return m;
}

Model load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

}  // namespace lde

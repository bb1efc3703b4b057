#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "lgwpr/error.hpp"
#include "lgwpr/simulate.hpp"

namespace lgwpr {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("scenario line " + std::to_string(line_) + ": " + msg);
  }
  double number(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail("'" + key + "' expects a number, got '" + v + "'");
    return out;
  }
  long long integer(const std::string& key, const std::string& v) const {
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail("'" + key + "' expects an integer, got '" + v + "'");
    return out;
  }

 private:
  std::size_t line_;
};

void apply(Scenario& s, const std::string& key, const std::string& value,
           const LineError& at) {
  if (key == "name") {
    s.name = value;
  } else if (key == "n") {
    s.n = at.integer(key, value);
  } else if (key == "mu0") {
    s.coef_means[0] = at.number(key, value);
  } else if (key == "range") {
    s.range = at.number(key, value);
  } else if (key == "replicates") {
    s.replicates = static_cast<int>(at.integer(key, value));
  } else if (key == "seed") {
    const long long seed = at.integer(key, value);
    if (seed < 0) at.fail("seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  } else if (key == "kernel") {
    try {
      s.kernel = parse_kernel_family(value);
    } catch (const Error& e) {
      at.fail(e.what());
    }
  } else if (key == "models") {
    s.models = split_list(value);
  } else if (key == "coef_means" || key == "coef_sds") {
    std::vector<double> v;
    for (const auto& item : split_list(value)) v.push_back(at.number(key, item));
    if (v.size() != 3) at.fail("'" + key + "' needs three values");
    (key == "coef_means" ? s.coef_means : s.coef_sds) = v;
  } else {
    at.fail("unknown key '" + key + "'");
  }
}

}  // namespace

std::vector<Scenario> parse_scenarios(std::istream& in) {
  Scenario defaults;
  std::vector<Scenario> sections;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const LineError at(number);
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') at.fail("unterminated section header");
      Scenario s = defaults;
      s.name = trim(std::string_view(text).substr(1, text.size() - 2));
      if (s.name.empty()) at.fail("empty section name");
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    apply(sections.empty() ? defaults : sections.back(), key, value, at);
  }
  if (sections.empty()) sections.push_back(defaults);
  for (const auto& s : sections) s.check();
  return sections;
}

std::vector<Scenario> read_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  return parse_scenarios(in);
}

}  // namespace lgwpr

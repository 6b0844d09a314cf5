#include "spx/kv_config.hpp"

#include <charconv>
#include <set>

#include "spx/error.hpp"
#include "spx/pgm.hpp"
#include "spx/serialize.hpp"

namespace spx::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": empty key");
    if (kv.contains(key)) throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) { return parse(io::read_text(path)); }

const std::string& KeyValues::at(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) throw Error(ErrorKind::Config, "missing key '" + key + "'");
  return entries_[it->second].second;
}

void KeyValues::set(const std::string& key, const std::string& value) {
  if (const auto it = index_.find(key); it != index_.end()) {
    entries_[it->second].second = value;
    return;
  }
  index_[key] = entries_.size();
  entries_.emplace_back(key, value);
}

std::string KeyValues::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc() || ptr != end)
    throw Error(ErrorKind::Config, "key '" + key + "': '" + value + "' is not a number");
  return v;
}

long parse_integer(const std::string& key, const std::string& value) {
  long v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc() || ptr != end)
    throw Error(ErrorKind::Config, "key '" + key + "': '" + value + "' is not an integer");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find_first_of(",:", start);
    if (end == std::string::npos) end = value.size();
    out.push_back(parse_number(key, trim(value.substr(start, end - start))));
    start = end + 1;
  }
  return out;
}

train::TrainConfig train_config_from(const KeyValues& kv, train::TrainConfig cfg) {
  static const std::set<std::string> known{"learning_rate", "batch_size", "epochs", "dropout",
                                           "leaky_slope",   "rate_mix",   "seed",   "max_steps"};
  for (const auto& [k, v] : kv.entries())
    if (!known.count(k)) throw Error(ErrorKind::Config, "unknown training key '" + k + "'");
  if (kv.contains("learning_rate")) cfg.learning_rate = parse_number("learning_rate", kv.at("learning_rate"));
  if (kv.contains("batch_size")) cfg.batch_size = static_cast<int>(parse_integer("batch_size", kv.at("batch_size")));
  if (kv.contains("epochs")) cfg.epochs = static_cast<int>(parse_integer("epochs", kv.at("epochs")));
  if (kv.contains("dropout")) cfg.dropout = parse_number("dropout", kv.at("dropout"));
  if (kv.contains("leaky_slope")) cfg.leaky_slope = parse_number("leaky_slope", kv.at("leaky_slope"));
  if (kv.contains("rate_mix")) cfg.rate_mix = parse_list("rate_mix", kv.at("rate_mix"));
  if (kv.contains("seed")) {
    const auto& s = kv.at("seed");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorKind::Config, "key 'seed': '" + s + "' is not an unsigned integer");
    cfg.seed = v;
  }
  if (kv.contains("max_steps")) cfg.max_steps = static_cast<int>(parse_integer("max_steps", kv.at("max_steps")));
  train::validate(cfg);
  return cfg;
}

KeyValues to_key_values(const train::TrainConfig& cfg) {
  KeyValues kv;
  kv.set("learning_rate", io::format_double(cfg.learning_rate));
  kv.set("batch_size", std::to_string(cfg.batch_size));
  kv.set("epochs", std::to_string(cfg.epochs));
  kv.set("dropout", io::format_double(cfg.dropout));
  kv.set("leaky_slope", io::format_double(cfg.leaky_slope));
  std::string mix;
  for (std::size_t i = 0; i < cfg.rate_mix.size(); ++i) mix += (i ? ":" : "") + io::format_double(cfg.rate_mix[i]);
  kv.set("rate_mix", mix);
  kv.set("seed", std::to_string(cfg.seed));
  kv.set("max_steps", std::to_string(cfg.max_steps));
  return kv;
}

}  // namespace spx::config

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spx/training.hpp"

namespace spx::config {

// Flat `key = value` text; `#` starts a comment; blank lines ignored.
// Keys keep their first-seen order when written back.
class KeyValues {
public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return index_.count(key) != 0; }
  const std::string& at(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  std::string str() const;

private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

double parse_number(const std::string& key, const std::string& value);
long parse_integer(const std::string& key, const std::string& value);
// Comma- or colon-separated numbers, e.g. "1:1:2".
std::vector<double> parse_list(const std::string& key, const std::string& value);

// Recognized keys: learning_rate, batch_size, epochs, dropout, leaky_slope,
// rate_mix, seed, max_steps. Unknown keys are a config error.
train::TrainConfig train_config_from(const KeyValues& kv, train::TrainConfig base = {});
KeyValues to_key_values(const train::TrainConfig& cfg);

}  // namespace spx::config

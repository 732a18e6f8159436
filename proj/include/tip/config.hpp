#ifndef TIP_CONFIG_HPP_
#define TIP_CONFIG_HPP_

#include <map>
#include <stdexcept>
#include <string>

#include "tip/harness.hpp"
#include "tip/simgen.hpp"

namespace tip
{

struct ConfigError : std::runtime_error
{
  explicit ConfigError(const std::string & what) : std::runtime_error("config error: " + what) {}
};

/// Flat `key value` text configuration; '#' starts a comment.
class KeyValueConfig
{
public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string & path);

  void set(const std::string & key, const std::string & value) { values_[key] = value; }
  bool has(const std::string & key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string> & values() const { return values_; }

  /// Applies every known key; throws ConfigError on unknown keys or bad
  /// values. Keys are shared between the two configs where they overlap.
  void apply(TrainConfig & train_cfg, GeneratorConfig & gen_cfg) const;

private:
  std::map<std::string, std::string> values_;
};

TaskKind task_from_string(const std::string & s);
std::string to_string(TaskKind kind);

}  // namespace tip

#endif  // TIP_CONFIG_HPP_

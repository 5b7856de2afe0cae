#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace topicprobe::cli {

// --config reader/writer. A JSON object maps long flag names (without the
// leading dashes) to values; arrays give multi-valued options and nested
// objects address subcommands. Top-level keys that are not options of the
// root app go to the subcommand selected on the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root = nullptr) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

}  // namespace topicprobe::cli

#include "json_config.hpp"

#include <json.hpp>

namespace topicprobe::cli {

namespace {

using nlohmann::json;

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten(const json& obj, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      auto nested = parents;
      nested.push_back(key);
      flatten(value, nested, out);
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v));
    } else if (!value.is_null()) {
      item.inputs.push_back(scalar_text(value));
    }
    out.push_back(std::move(item));
  }
}

json option_json(const CLI::Option* opt, const std::vector<std::string>& values) {
  if (opt->get_type_size() == 0) return opt->as<bool>();
  if (opt->get_expected_max() > 1) return values;
  return values.empty() ? json() : json(values.front());
}

// Names of the parsed subcommand chain below app, outermost first.
std::vector<std::string> selected_path(const CLI::App* app) {
  std::vector<std::string> path;
  while (app) {
    const auto subs = app->get_subcommands();
    app = subs.empty() ? nullptr : subs.front();
    if (app) path.push_back(app->get_name());
  }
  return path;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      out[name] = option_json(opt, opt->results());
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  for (const CLI::App* sub : app->get_subcommands()) {
    const json nested = json::parse(to_config(sub, default_also, false, ""));
    if (!nested.empty()) out[sub->get_name()] = nested;
  }
  return out.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::exception& e) {
    throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
  std::vector<CLI::ConfigItem> items;
  flatten(doc, {}, items);
  if (root_) {
    const auto path = selected_path(root_);
    for (auto& item : items) {
      if (!item.parents.empty() || root_->get_option_no_throw("--" + item.name)) continue;
      item.parents = path;
    }
  }
  return items;
}

}  // namespace topicprobe::cli

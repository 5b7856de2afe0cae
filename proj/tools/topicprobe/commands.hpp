#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <topicprobe/probe.hpp>
#include <topicprobe/synth.hpp>

namespace topicprobe::cli {

namespace fs = std::filesystem;

struct TopicsArgs {
  fs::path dataset;
  std::vector<int> num_topics;
  std::uint64_t seed = 0;
  std::size_t min_tail = 5;
  int folds = 5;
  fs::path out;
};

struct RunArgs {
  fs::path dataset;
  std::vector<fs::path> embeddings;
  std::string sizes = "5:50:5";
  int folds = 5;
  std::size_t min_tail = 5;
  std::uint64_t seed = 0;
  int jobs = 1;
  ProbeConfig probe;
  fs::path out;
};

struct GloveArgs {
  fs::path dataset;
  fs::path table;
  std::string name = "glove";
  fs::path out;
};

struct RandomArgs {
  fs::path dataset;
  std::uint32_t dim = 768;
  std::uint64_t seed = 0;
  std::string name = "random";
  fs::path out;
};

struct EntropyArgs {
  fs::path dataset;
  std::vector<fs::path> partitions;
  fs::path out;
};

struct SynthArgs {
  SynthSpec spec;
  fs::path out;
};

struct SensitivityArgs {
  fs::path tasks;
  fs::path out;
};

// "5:50:5" (start:stop:step, inclusive) or a comma-separated list.
std::vector<int> parse_sizes(const std::string& text);

void cmd_topics(const TopicsArgs& args);
void cmd_run(const RunArgs& args, const std::string& config_json);
void cmd_baseline_glove(const GloveArgs& args);
void cmd_baseline_random(const RandomArgs& args);
void cmd_entropy(const EntropyArgs& args);
void cmd_synth(const SynthArgs& args);
void cmd_sensitivity(const SensitivityArgs& args);

}  // namespace topicprobe::cli

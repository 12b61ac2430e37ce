#include "pool/harness/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pool/kv.hpp"

namespace pool::harness {
namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

const std::string& metrics_header() {
  static const std::string header =
      "episode,mean_reward,min_reward,max_reward,food_rate,hole_rate,kills,deaths,epsilon,steps";
  return header;
}

std::string format_metrics(std::span<const EpisodeRecord> records) {
  std::string out = metrics_header() + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.episode) + "," + real(r.mean_reward) + "," + real(r.min_reward) + "," +
           real(r.max_reward) + "," + real(r.food_rate) + "," + real(r.hole_rate) + "," +
           std::to_string(r.kills) + "," + std::to_string(r.deaths) + "," + real(r.epsilon) + "," +
           std::to_string(r.steps) + "\n";
  }
  return out;
}

std::vector<EpisodeRecord> parse_metrics(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != metrics_header()) {
    throw std::runtime_error("metrics: unexpected header");
  }
  std::vector<EpisodeRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_list(line);
    if (f.size() != 10) throw std::runtime_error("metrics: expected 10 fields");
    EpisodeRecord r;
    r.episode = static_cast<int>(parse_int(f[0], "episode"));
    r.mean_reward = parse_double(f[1], "mean_reward");
    r.min_reward = parse_double(f[2], "min_reward");
    r.max_reward = parse_double(f[3], "max_reward");
    r.food_rate = parse_double(f[4], "food_rate");
    r.hole_rate = parse_double(f[5], "hole_rate");
    r.kills = static_cast<int>(parse_int(f[6], "kills"));
    r.deaths = static_cast<int>(parse_int(f[7], "deaths"));
    r.epsilon = parse_double(f[8], "epsilon");
    r.steps = static_cast<int>(parse_int(f[9], "steps"));
    out.push_back(r);
  }
  return out;
}

void write_metrics(const std::filesystem::path& path, std::span<const EpisodeRecord> records) {
  write_file(path, format_metrics(records));
}

void write_timing(const std::filesystem::path& path, std::span<const EpisodeRecord> records) {
  std::string out = "episode,wall_ms\n";
  for (const auto& r : records) out += std::to_string(r.episode) + "," + real(r.wall_ms) + "\n";
  write_file(path, out);
}

double final_window_mean(std::span<const EpisodeRecord> records, int window) {
  if (records.empty()) return 0.0;
  const std::size_t n = std::min<std::size_t>(records.size(), static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = records.size() - n; i < records.size(); ++i) sum += records[i].mean_reward;
  return sum / static_cast<double>(n);
}

double final_window_food_rate(std::span<const EpisodeRecord> records, int window) {
  if (records.empty()) return 0.0;
  const std::size_t n = std::min<std::size_t>(records.size(), static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = records.size() - n; i < records.size(); ++i) sum += records[i].food_rate;
  return sum / static_cast<double>(n);
}

int best_trailing_episode(std::span<const EpisodeRecord> records, int window) {
  if (records.empty()) return -1;
  const int w = std::max(window, 1);
  int best = -1;
  double best_mean = 0.0;
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    sum += records[i].mean_reward;
    if (i >= w) sum -= records[i - w].mean_reward;
    if (i + 1 < w && i + 1 < static_cast<int>(records.size())) continue;
    const double mean = sum / std::min(i + 1, w);
    if (best < 0 || mean > best_mean) {
      best = i;
      best_mean = mean;
    }
  }
  return best < 0 ? static_cast<int>(records.size()) - 1 : best;
}

}  // namespace pool::harness

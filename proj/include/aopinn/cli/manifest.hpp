#pragma once

// Run manifest: resolved configuration, version, RNG algorithms, stage
// timings, results and a SHA-256 inventory of every emitted file.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aopinn/cli/config.hpp"
#include "aopinn/errors.hpp"
#include "aopinn/rng.hpp"

#ifndef AOPINN_VERSION
#define AOPINN_VERSION "unknown"
#endif

namespace aopinn::cli {

namespace fs = std::filesystem;

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

/// Collects outputs of one run in memory; finish() writes them all, then the
/// manifest, so a failed run leaves no outputs behind.
class RunRecorder {
 public:
  RunRecorder(std::string command, const RunConfig& cfg) : command_(std::move(command)), dir_(cfg.out_dir) {
    manifest_["tool"] = "aopinn";
    manifest_["version"] = AOPINN_VERSION;
    manifest_["command"] = command_;
    nlohmann::ordered_json c;
    for (const auto& [k, v] : cfg.entries()) c[k] = v;
    manifest_["config"] = c;
    manifest_["rng"] = {{"algorithm", CounterRng::algorithm},
                        {"test_sampling_seed", cfg.seed_data},
                        {"weight_init_seed", cfg.seed_init},
                        {"bo_design_seed", cfg.seed_bo}};
    manifest_["metadata"] = {{"input_normalization", "t/" + detail::fmt_double(cfg.time_scale)},
                             {"activation", "tanh"},
                             {"optimizer", "adam beta1=0.9 beta2=0.999 eps=1e-8 full batch"},
                             {"collocation", "training observation times"},
                             {"test_error", "data loss with the mode's compartment weights on the test set"},
                             {"gp_kernel", "matern52, length scale by max marginal likelihood on 10 log-spaced values in [0.01,0.5]"},
                             {"gp_noise_floor", 1e-10},
                             {"bo_acquisition", "expected improvement, 1001-point grid, ties to smallest epsilon"},
                             {"bo_failure_penalty", 1e6}};
    manifest_["timings_seconds"] = nlohmann::ordered_json::object();
    manifest_["results"] = nlohmann::ordered_json::object();
    manifest_["files"] = nlohmann::ordered_json::array();
  }

  [[nodiscard]] const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    pending_.emplace_back(name, content);
    manifest_["files"].push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  template <class F>
  void write_with(const std::string& name, F&& fill) {
    std::ostringstream os;
    fill(os);
    write(name, os.str());
  }

  template <class T>
  void result(const std::string& key, const T& value) {
    manifest_["results"][key] = value;
  }

  /// Runs fn and records its wall time under `stage`.
  template <class F>
  decltype(auto) stage(const std::string& name, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Timer {
      RunRecorder* self;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Timer() {
        self->manifest_["timings_seconds"][name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } timer{this, name, t0};
    return fn();
  }

  [[nodiscard]] const nlohmann::ordered_json& manifest() const { return manifest_; }

  void finish() {
    fs::create_directories(dir_);
    for (const auto& [name, content] : pending_) write_file_atomic(dir_ / name, content);
    write_file_atomic(dir_ / "manifest.json", manifest_.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  nlohmann::ordered_json manifest_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

}  // namespace aopinn::cli

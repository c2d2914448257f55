#pragma once

// Versioned text checkpoint: architecture, seeds and every parameter as a
// hexadecimal float, so a reload is bit-exact.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "aopinn/pinn.hpp"

namespace aopinn::cli {

inline constexpr const char* kCheckpointMagic = "aopinn-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct CheckpointSeeds {
  std::uint64_t data = 0;
  std::uint64_t init = 0;
  std::uint64_t bo = 0;
};

struct Checkpoint {
  PinnModel model;
  CheckpointSeeds seeds;
};

inline std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline void write_checkpoint(std::ostream& os, const PinnModel& model, const CheckpointSeeds& seeds) {
  const auto& arch = model.architecture();
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  os << "hidden";
  for (int h : arch.hidden) os << ' ' << h;
  os << '\n';
  os << "time_scale " << hex_double(arch.time_scale) << '\n';
  os << "trainable_epsilon " << (model.has_trainable_epsilon() ? 1 : 0) << '\n';
  os << "seeds " << seeds.data << ' ' << seeds.init << ' ' << seeds.bo << '\n';
  os << "parameters " << model.parameter_count() << '\n';
  const auto& p = model.parameters();
  for (Index k = 0; k < p.size(); ++k) os << hex_double(p[k]) << '\n';
}

inline Checkpoint read_checkpoint(std::istream& is) {
  auto fail = [](const std::string& what) -> Checkpoint { throw ValidationError("checkpoint: " + what); };
  auto expect_key = [&](std::istringstream& line, const char* key) {
    std::string k;
    line >> k;
    if (k != key) fail(std::string("expected '") + key + "'");
  };
  auto next_line = [&](std::string& line) {
    if (!std::getline(is, line)) fail("unexpected end of file");
  };
  auto parse_hex = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail("bad number '" + s + "'");
    return v;
  };

  std::string line;
  next_line(line);
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kCheckpointMagic) fail("not a checkpoint file");
    if (version != kCheckpointVersion) fail("unsupported version " + std::to_string(version));
  }
  Architecture arch;
  arch.hidden.clear();
  next_line(line);
  {
    std::istringstream ls(line);
    expect_key(ls, "hidden");
    int h = 0;
    while (ls >> h) arch.hidden.push_back(h);
  }
  next_line(line);
  {
    std::istringstream ls(line);
    expect_key(ls, "time_scale");
    std::string v;
    ls >> v;
    arch.time_scale = parse_hex(v);
  }
  int trainable = 0;
  next_line(line);
  {
    std::istringstream ls(line);
    expect_key(ls, "trainable_epsilon");
    ls >> trainable;
  }
  CheckpointSeeds seeds;
  next_line(line);
  {
    std::istringstream ls(line);
    expect_key(ls, "seeds");
    if (!(ls >> seeds.data >> seeds.init >> seeds.bo)) fail("bad seeds line");
  }
  long count = -1;
  next_line(line);
  {
    std::istringstream ls(line);
    expect_key(ls, "parameters");
    ls >> count;
  }
  arch.validate();
  PinnModel model(arch, trainable != 0 ? std::optional<double>(0.0) : std::nullopt);
  if (count != model.parameter_count()) fail("parameter count does not match the architecture");
  Vector p(count);
  for (long k = 0; k < count; ++k) {
    next_line(line);
    p[k] = parse_hex(line);
  }
  model.set_parameters(p);
  return {model, seeds};
}

}  // namespace aopinn::cli

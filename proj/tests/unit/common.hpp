#pragma once

#include <optional>

#include "modeinv/model.hpp"

namespace modeinv::test {

inline SetupParameters natural(int resonant_mode = 2, double v = 1e-3, double ratio = 1e-4,
                               double detuning = 0.0) {
  SetupParameters p;
  p.units = UnitSystem::natural;
  p.cavity_length = 1.0;
  p.light_speed = 1.0;
  p.atom_speed = v;
  p.coupling_ratio = ratio;
  p.gap = GapSpec{std::nullopt, resonant_mode, detuning};
  return p;
}

inline SetupParameters microcavity(int resonant_mode = 2, double ratio = 1e-4) {
  SetupParameters p;
  p.units = UnitSystem::si;
  p.cavity_length = 1e-6;
  p.light_speed = 3e8;
  p.atom_speed = 1e3;
  p.coupling_ratio = ratio;
  p.gap = GapSpec{std::nullopt, resonant_mode, 0.0};
  return p;
}

inline SetupParameters explicit_gap(double gap, double v = 1e-3, double length = 1.0) {
  SetupParameters p;
  p.cavity_length = length;
  p.atom_speed = v;
  p.gap = GapSpec{gap, std::nullopt, 0.0};
  return p;
}

}  // namespace modeinv::test

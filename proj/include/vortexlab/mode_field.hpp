#pragma once

#include "vortexlab/profiles.hpp"
#include "vortexlab/radial_grid.hpp"

#include <compare>
#include <functional>
#include <map>

namespace vortexlab {

enum class DecayClass { Schwartz, Polynomial };

struct ModeKey {
  int n = 0;
  Parity parity = Parity::Cos;
  friend auto operator<=>(const ModeKey&, const ModeKey&) = default;
};

// Samples of one radial factor. `deriv` holds an exact radial derivative when one is known
// and is empty otherwise (stencils are used then).
struct RadialProfile {
  Vec values;
  Vec deriv;
  DecayClass decay = DecayClass::Schwartz;
  bool has_deriv() const { return deriv.size() == values.size() && values.size() > 0; }
};

// f(rho, theta) = sum over (n, parity) of a_{n,parity}(rho) * cos(n theta) or sin(n theta).
class ModeField {
 public:
  ModeField() = default;
  explicit ModeField(GridPtr grid) : grid_(std::move(grid)) {}

  const GridPtr& grid() const { return grid_; }
  const std::map<ModeKey, RadialProfile>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool has(int n, Parity p) const { return entries_.count({n, p}) > 0; }
  // Zero vector when the entry is absent.
  Vec profile(int n, Parity p) const;
  const RadialProfile* find(int n, Parity p) const;

  // Replaces an entry. Sin entries at n = 0 are rejected.
  void set(int n, Parity p, Vec values, Vec deriv = Vec(), DecayClass decay = DecayClass::Schwartz);
  // Accumulates scale*values into an entry, keeping exact derivatives exact.
  void add(int n, Parity p, const Vec& values, double scale = 1.0, const Vec* deriv = nullptr,
           DecayClass decay = DecayClass::Schwartz);
  void add(int n, Parity p, const RadialProfile& prof, double scale = 1.0);
  void erase(int n, Parity p) { entries_.erase({n, p}); }

  Vec radial_derivative(int n, Parity p) const;
  Vec radial_second_derivative(int n, Parity p) const;

  int max_mode() const;
  DecayClass decay() const;
  double max_abs() const;
  double eval(double rho, double theta) const;

  // Drops entries whose largest sample is at most tol.
  ModeField pruned(double tol = 0.0) const;
  // Same modes/parities, values transformed per entry.
  ModeField map_profiles(const std::function<Vec(int n, Parity p, const Vec&)>& fn) const;

  ModeField& operator+=(const ModeField& o);
  ModeField& operator-=(const ModeField& o);
  ModeField& operator*=(double a);
  ModeField& axpy(double a, const ModeField& o);

 private:
  GridPtr grid_;
  std::map<ModeKey, RadialProfile> entries_;
};

ModeField operator+(ModeField a, const ModeField& b);
ModeField operator-(ModeField a, const ModeField& b);
ModeField operator*(double s, ModeField a);
ModeField operator*(ModeField a, double s);
ModeField operator-(ModeField a);

struct VectorModeField {
  ModeField c1, c2;

  VectorModeField() = default;
  explicit VectorModeField(const GridPtr& g) : c1(g), c2(g) {}
  VectorModeField(ModeField a, ModeField b) : c1(std::move(a)), c2(std::move(b)) {}

  ModeField& operator[](int i) { return i == 0 ? c1 : c2; }
  const ModeField& operator[](int i) const { return i == 0 ? c1 : c2; }
  const GridPtr& grid() const { return c1.grid(); }

  VectorModeField& operator+=(const VectorModeField& o);
  VectorModeField& operator-=(const VectorModeField& o);
  VectorModeField& operator*=(double a);
  VectorModeField& axpy(double a, const VectorModeField& o);
};

VectorModeField operator+(VectorModeField a, const VectorModeField& b);
VectorModeField operator-(VectorModeField a, const VectorModeField& b);
VectorModeField operator*(double s, VectorModeField a);

// ---- standard fields ----
Vec sample(const GridPtr& g, const std::function<double(double)>& f);
ModeField field_G(const GridPtr& g, double scale = 1.0);
ModeField field_upsilon(const GridPtr& g, double scale = 1.0);
// d_j G for j = 1, 2.
ModeField field_dG(const GridPtr& g, int j, double scale = 1.0);
// scale * Q^c_n or Q^s_n (n = 0 cos gives the constant).
ModeField field_Q(const GridPtr& g, int n, Parity p, double scale = 1.0);
// scale * |xi|^2
ModeField field_rho2(const GridPtr& g, double scale = 1.0);
ModeField field_radial(const GridPtr& g, int n, Parity p, const std::function<double(double)>& f,
                       DecayClass decay = DecayClass::Schwartz);

}  // namespace vortexlab

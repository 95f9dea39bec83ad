#include "vortexlab/mode_field.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab {

namespace {

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

Vec ModeField::profile(int n, Parity p) const {
  auto it = entries_.find({n, p});
  if (it == entries_.end()) return Vec::Zero(grid_->size());
  return it->second.values;
}

const RadialProfile* ModeField::find(int n, Parity p) const {
  auto it = entries_.find({n, p});
  return it == entries_.end() ? nullptr : &it->second;
}

void ModeField::set(int n, Parity p, Vec values, Vec deriv, DecayClass decay) {
  if (n < 0) throw std::invalid_argument("ModeField: negative mode");
  if (n == 0 && p == Parity::Sin) throw std::invalid_argument("ModeField: mode 0 has no sin part");
  if (values.size() != grid_->size()) throw std::invalid_argument("ModeField: profile size mismatch");
  entries_[{n, p}] = RadialProfile{std::move(values), std::move(deriv), decay};
}

void ModeField::add(int n, Parity p, const Vec& values, double scale, const Vec* deriv, DecayClass decay) {
  if (n == 0 && p == Parity::Sin) return;
  if (n < 0) throw std::invalid_argument("ModeField: negative mode");
  auto it = entries_.find({n, p});
  const bool in_deriv = deriv != nullptr && deriv->size() == values.size();
  if (it == entries_.end()) {
    RadialProfile prof;
    prof.values = scale * values;
    if (in_deriv) prof.deriv = scale * (*deriv);
    prof.decay = decay;
    entries_.emplace(ModeKey{n, p}, std::move(prof));
    return;
  }
  RadialProfile& cur = it->second;
  if (cur.has_deriv() && !in_deriv) {
    cur.deriv += scale * grid_->d1(values, parity_sign(n));
  } else if (!cur.has_deriv() && in_deriv) {
    cur.deriv = grid_->d1(cur.values, parity_sign(n)) + scale * (*deriv);
  } else if (in_deriv) {
    cur.deriv += scale * (*deriv);
  }
  cur.values += scale * values;
  if (decay == DecayClass::Polynomial) cur.decay = DecayClass::Polynomial;
}

void ModeField::add(int n, Parity p, const RadialProfile& prof, double scale) {
  add(n, p, prof.values, scale, prof.has_deriv() ? &prof.deriv : nullptr, prof.decay);
}

Vec ModeField::radial_derivative(int n, Parity p) const {
  const RadialProfile* prof = find(n, p);
  if (!prof) return Vec::Zero(grid_->size());
  if (prof->has_deriv()) return prof->deriv;
  return grid_->d1(prof->values, parity_sign(n));
}

Vec ModeField::radial_second_derivative(int n, Parity p) const {
  const RadialProfile* prof = find(n, p);
  if (!prof) return Vec::Zero(grid_->size());
  if (prof->has_deriv()) return grid_->d1(prof->deriv, -parity_sign(n));
  return grid_->d2(prof->values, parity_sign(n));
}

int ModeField::max_mode() const {
  int m = 0;
  for (const auto& [k, v] : entries_) m = std::max(m, k.n);
  return m;
}

DecayClass ModeField::decay() const {
  for (const auto& [k, v] : entries_)
    if (v.decay == DecayClass::Polynomial) return DecayClass::Polynomial;
  return DecayClass::Schwartz;
}

double ModeField::max_abs() const {
  double m = 0.0;
  for (const auto& [k, v] : entries_) m = std::max(m, v.values.cwiseAbs().maxCoeff());
  return m;
}

double ModeField::eval(double rho, double theta) const {
  double acc = 0.0;
  for (const auto& [k, v] : entries_) {
    const double a = grid_->interpolate(v.values, parity_sign(k.n), rho);
    acc += a * (k.parity == Parity::Cos ? std::cos(k.n * theta) : std::sin(k.n * theta));
  }
  return acc;
}

ModeField ModeField::pruned(double tol) const {
  ModeField out(grid_);
  for (const auto& [k, v] : entries_)
    if (v.values.cwiseAbs().maxCoeff() > tol) out.entries_.emplace(k, v);
  return out;
}

ModeField ModeField::map_profiles(const std::function<Vec(int, Parity, const Vec&)>& fn) const {
  ModeField out(grid_);
  for (const auto& [k, v] : entries_) out.set(k.n, k.parity, fn(k.n, k.parity, v.values), Vec(), v.decay);
  return out;
}

ModeField& ModeField::axpy(double a, const ModeField& o) {
  if (!grid_) grid_ = o.grid_;
  for (const auto& [k, v] : o.entries_) add(k.n, k.parity, v, a);
  return *this;
}

ModeField& ModeField::operator+=(const ModeField& o) { return axpy(1.0, o); }
ModeField& ModeField::operator-=(const ModeField& o) { return axpy(-1.0, o); }

ModeField& ModeField::operator*=(double a) {
  for (auto& [k, v] : entries_) {
    v.values *= a;
    if (v.has_deriv()) v.deriv *= a;
  }
  return *this;
}

ModeField operator+(ModeField a, const ModeField& b) { return a += b; }
ModeField operator-(ModeField a, const ModeField& b) { return a -= b; }
ModeField operator*(double s, ModeField a) { return a *= s; }
ModeField operator*(ModeField a, double s) { return a *= s; }
ModeField operator-(ModeField a) { return a *= -1.0; }

VectorModeField& VectorModeField::operator+=(const VectorModeField& o) {
  c1 += o.c1;
  c2 += o.c2;
  return *this;
}
VectorModeField& VectorModeField::operator-=(const VectorModeField& o) {
  c1 -= o.c1;
  c2 -= o.c2;
  return *this;
}
VectorModeField& VectorModeField::operator*=(double a) {
  c1 *= a;
  c2 *= a;
  return *this;
}
VectorModeField& VectorModeField::axpy(double a, const VectorModeField& o) {
  c1.axpy(a, o.c1);
  c2.axpy(a, o.c2);
  return *this;
}
VectorModeField operator+(VectorModeField a, const VectorModeField& b) { return a += b; }
VectorModeField operator-(VectorModeField a, const VectorModeField& b) { return a -= b; }
VectorModeField operator*(double s, VectorModeField a) { return a *= s; }

Vec sample(const GridPtr& g, const std::function<double(double)>& f) {
  Vec v(g->size());
  for (int i = 0; i < g->size(); ++i) v(i) = f(g->node(i));
  return v;
}

ModeField field_G(const GridPtr& g, double scale) {
  ModeField f(g);
  f.set(0, Parity::Cos, scale * sample(g, gaussian_G), scale * sample(g, gaussian_G_prime));
  return f;
}

ModeField field_upsilon(const GridPtr& g, double scale) {
  ModeField f(g);
  f.set(0, Parity::Cos, scale * sample(g, upsilon), scale * sample(g, upsilon_prime), DecayClass::Polynomial);
  return f;
}

ModeField field_dG(const GridPtr& g, int j, double scale) {
  ModeField f(g);
  Vec v = scale * sample(g, gaussian_G_prime);
  Vec d = scale * sample(g, [](double r) { return (0.25 * r * r - 0.5) * gaussian_G(r); });
  f.set(1, j == 1 ? Parity::Cos : Parity::Sin, std::move(v), std::move(d));
  return f;
}

ModeField field_Q(const GridPtr& g, int n, Parity p, double scale) {
  ModeField f(g);
  Vec v = scale * sample(g, [n](double r) { return std::pow(r, n); });
  Vec d = n == 0 ? Vec::Zero(g->size()) : Vec(scale * n * sample(g, [n](double r) { return std::pow(r, n - 1); }));
  f.set(n, p, std::move(v), std::move(d), DecayClass::Polynomial);
  return f;
}

ModeField field_rho2(const GridPtr& g, double scale) {
  ModeField f(g);
  f.set(0, Parity::Cos, scale * sample(g, [](double r) { return r * r; }),
        scale * sample(g, [](double r) { return 2.0 * r; }), DecayClass::Polynomial);
  return f;
}

ModeField field_radial(const GridPtr& g, int n, Parity p, const std::function<double(double)>& fn,
                       DecayClass decay) {
  ModeField f(g);
  f.set(n, p, sample(g, fn), Vec(), decay);
  return f;
}

}  // namespace vortexlab

#include "vortexlab/ns_solver.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace vortexlab {

double GridField::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * h() * h();
}

Eigen::Vector2d GridField::moment() const {
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (int j = 0; j < n; ++j) {
    const double y = coord(j);
    double row = 0.0, rowx = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = at(i, j);
      row += v;
      rowx += coord(i) * v;
    }
    m(0) += rowx;
    m(1) += y * row;
  }
  return m * h() * h();
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridField::sample(double x, double y) const {
  const double hh = h();
  const double fx = (x + 0.5 * box) / hh, fy = (y + 0.5 * box) / hh;
  const double ix = std::floor(fx), iy = std::floor(fy);
  const double ax = fx - ix, ay = fy - iy;
  auto wrap = [this](long k) { return static_cast<int>(((k % n) + n) % n); };
  const int i0 = wrap(static_cast<long>(ix)), i1 = wrap(static_cast<long>(ix) + 1);
  const int j0 = wrap(static_cast<long>(iy)), j1 = wrap(static_cast<long>(iy) + 1);
  return (1 - ax) * (1 - ay) * at(i0, j0) + ax * (1 - ay) * at(i1, j0) + (1 - ax) * ay * at(i0, j1) +
         ax * ay * at(i1, j1);
}

void SolverConfig::validate(double d) const {
  if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("SolverConfig: n must be a power of two >= 16");
  if (!(box >= 8.0 * d)) throw std::invalid_argument("SolverConfig: box must be at least 8 d");
  if (!(nu > 0.0)) throw std::invalid_argument("SolverConfig: nu must be positive");
  if (!(t0 > 0.0)) throw std::invalid_argument("SolverConfig: t0 must be positive");
  if (!(t_end >= t0)) throw std::invalid_argument("SolverConfig: t_end must be >= t0");
  if (!(cfl > 0.0 && cfl <= 1.5)) throw std::invalid_argument("SolverConfig: cfl must lie in (0, 1.5]");
  if (!(dealias > 0.0 && dealias <= 1.0)) throw std::invalid_argument("SolverConfig: dealias must lie in (0, 1]");
  if (output_stride < 0) throw std::invalid_argument("SolverConfig: output_stride must be >= 0");
  if (std::sqrt(nu * t0) / d > 0.1 + 1e-12)
    throw std::invalid_argument("SolverConfig: initial eps = sqrt(nu t0)/d must be <= 0.1");
}

GridField init_oseen(const std::vector<OseenSpec>& vortices, const SolverConfig& cfg) {
  GridField w(cfg.n, cfg.box);
  w.time = cfg.t0;
  w.nu = cfg.nu;
  const double s2 = cfg.nu * cfg.t0;
  if (std::sqrt(s2) < 3.0 * w.h())
    throw std::invalid_argument("init_oseen: core unresolved, need sqrt(nu t0) >= 3 h (sqrt(nu t0) = " +
                                std::to_string(std::sqrt(s2)) + ", h = " + std::to_string(w.h()) + ")");
  const double L = cfg.box;
  for (const auto& v : vortices) {
    const double amp = v.gamma / (4.0 * kPi * s2);
    for (int j = 0; j < w.n; ++j) {
      for (int i = 0; i < w.n; ++i) {
        double acc = 0.0;
        for (int my = -1; my <= 1; ++my)
          for (int mx = -1; mx <= 1; ++mx) {
            const double dx = w.coord(i) - v.center(0) + mx * L;
            const double dy = w.coord(j) - v.center(1) + my * L;
            acc += std::exp(-(dx * dx + dy * dy) / (4.0 * s2));
          }
        w.at(i, j) += amp * acc;
      }
    }
  }
  return w;
}

GridField init_superposed_oseen(const Circulations& c, const SolverConfig& cfg) {
  c.validate();
  cfg.validate(c.d);
  return init_oseen({{{c.ell(0), 0.0}, c.gamma1}, {{c.ell(1), 0.0}, c.gamma2}}, cfg);
}

namespace {

using cplx = std::complex<double>;

// Shared FFT workspace for one grid size.
struct Fft {
  int n, nc;
  double* r;
  fftw_complex* c;
  fftw_plan fwd, bwd;
  explicit Fft(int n_) : n(n_), nc(n_ / 2 + 1) {
    r = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    c = fftw_alloc_complex(static_cast<std::size_t>(n) * nc);
    fwd = fftw_plan_dft_r2c_2d(n, n, r, c, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, c, r, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(r);
    fftw_free(c);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  std::size_t rsize() const { return static_cast<std::size_t>(n) * n; }
  std::size_t csize() const { return static_cast<std::size_t>(n) * nc; }

  void forward(const double* in, cplx* out) {
    std::memcpy(r, in, rsize() * sizeof(double));
    fftw_execute(fwd);
    std::memcpy(static_cast<void*>(out), c, csize() * sizeof(fftw_complex));
  }
  // normalized inverse
  void backward(const cplx* in, double* out) {
    std::memcpy(c, in, csize() * sizeof(fftw_complex));
    fftw_execute(bwd);
    const double s = 1.0 / static_cast<double>(rsize());
    for (std::size_t k = 0; k < rsize(); ++k) out[k] = r[k] * s;
  }
};

struct Wavenumbers {
  std::vector<double> kx, ky;  // kx over the half axis (nc), ky over n
  std::vector<int> ix, iy;     // signed indices
  Wavenumbers(int n, double box) {
    const double dk = 2.0 * kPi / box;
    for (int i = 0; i <= n / 2; ++i) {
      ix.push_back(i);
      kx.push_back(i == n / 2 ? 0.0 : dk * i);  // Nyquist derivative set to zero
    }
    for (int j = 0; j < n; ++j) {
      const int s = j <= n / 2 ? j : j - n;
      iy.push_back(s);
      ky.push_back(j == n / 2 ? 0.0 : dk * s);
    }
  }
};

double k2_of(int sx, int sy, double dk) { return dk * dk * (static_cast<double>(sx) * sx + static_cast<double>(sy) * sy); }

}  // namespace

Velocity biot_savart_velocity(const GridField& w) {
  const int n = w.n;
  Fft fft(n);
  Wavenumbers kw(n, w.box);
  const double dk = 2.0 * kPi / w.box;
  std::vector<cplx> wh(fft.csize()), uh(fft.csize()), vh(fft.csize());
  fft.forward(w.values.data(), wh.data());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < fft.nc; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * fft.nc + i;
      const double k2 = k2_of(kw.ix[i], kw.iy[j], dk);
      const cplx psi = k2 > 0.0 ? -wh[k] / k2 : cplx(0.0);
      uh[k] = -cplx(0.0, kw.ky[j]) * psi;
      vh[k] = cplx(0.0, kw.kx[i]) * psi;
    }
  Velocity out{GridField(n, w.box), GridField(n, w.box)};
  out.u.time = out.v.time = w.time;
  out.u.nu = out.v.nu = w.nu;
  fft.backward(uh.data(), out.u.values.data());
  fft.backward(vh.data(), out.v.values.data());
  return out;
}

double spectral_tail_fraction(const GridField& w, double dealias) {
  const int n = w.n;
  Fft fft(n);
  Wavenumbers kw(n, w.box);
  std::vector<cplx> wh(fft.csize());
  fft.forward(w.values.data(), wh.data());
  const double kc = dealias * n / 2.0;
  double total = 0.0, tail = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < fft.nc; ++i) {
      const double kk = std::hypot(static_cast<double>(kw.ix[i]), static_cast<double>(kw.iy[j]));
      if (kk == 0.0) continue;
      // half-plane storage: interior columns stand for two modes
      const double mult = (i == 0 || i == n / 2) ? 1.0 : 2.0;
      const double e = mult * std::norm(wh[static_cast<std::size_t>(j) * fft.nc + i]) / (kk * kk);
      total += e;
      if (kk >= 0.5 * kc && kk < kc) tail += e;
    }
  return total > 0.0 ? tail / total : 0.0;
}

struct SpectralSolver::Impl {
  int n;
  double box, nu, dealias;
  bool advect;
  Fft fft;
  Wavenumbers kw;
  std::vector<double> k2, mask, ikpsi, eh;  // |k|^2, dealias mask, 1/|k|^2 (0 at k = 0), half-step decay
  std::vector<cplx> wh, k1, k2s, k3, k4, tmp, buf;
  std::vector<double> ru, rv, rwx, rwy, prod;
  double last_umax = 0.0;

  Impl(int n_, double box_, double nu_, double dealias_, bool advect_)
      : n(n_), box(box_), nu(nu_), dealias(dealias_), advect(advect_), fft(n_), kw(n_, box_) {
    const std::size_t cs = fft.csize(), rs = fft.rsize();
    k2.resize(cs);
    mask.resize(cs);
    ikpsi.resize(cs);
    eh.resize(cs);
    const double dk = 2.0 * kPi / box;
    const double cut = dealias * n / 2.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < fft.nc; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * fft.nc + i;
        k2[k] = k2_of(kw.ix[i], kw.iy[j], dk);
        ikpsi[k] = k2[k] > 0.0 ? 1.0 / k2[k] : 0.0;
        const bool keep = std::abs(kw.ix[i]) < cut && std::abs(kw.iy[j]) < cut && i != n / 2 && j != n / 2;
        mask[k] = keep ? 1.0 : 0.0;
      }
    for (auto* v : {&wh, &k1, &k2s, &k3, &k4, &tmp, &buf}) v->assign(cs, cplx(0.0));
    for (auto* v : {&ru, &rv, &rwx, &rwy, &prod}) v->assign(rs, 0.0);
  }

  // out = -P(u . grad w), with max |u| recorded
  void nonlinear(const std::vector<cplx>& w, std::vector<cplx>& out) {
    const std::size_t cs = fft.csize(), rs = fft.rsize();
    if (!advect) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      last_umax = 0.0;
      return;
    }
    auto derive = [&](int which, std::vector<double>& dst) {
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < fft.nc; ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * fft.nc + i;
          const cplx psi = -w[k] * ikpsi[k];
          switch (which) {
            case 0: buf[k] = cplx(0.0, -kw.ky[j]) * psi; break;
            case 1: buf[k] = cplx(0.0, kw.kx[i]) * psi; break;
            case 2: buf[k] = cplx(0.0, kw.kx[i]) * w[k]; break;
            default: buf[k] = cplx(0.0, kw.ky[j]) * w[k]; break;
          }
        }
      fft.backward(buf.data(), dst.data());
    };
    derive(0, ru);
    derive(1, rv);
    derive(2, rwx);
    derive(3, rwy);
    double um = 0.0;
    for (std::size_t k = 0; k < rs; ++k) {
      prod[k] = ru[k] * rwx[k] + rv[k] * rwy[k];
      um = std::max(um, std::hypot(ru[k], rv[k]));
    }
    last_umax = um;
    fft.forward(prod.data(), out.data());
    for (std::size_t k = 0; k < cs; ++k) out[k] *= -mask[k];
    out[0] = 0.0;
  }

  void rk4(double dt) {
    const std::size_t cs = fft.csize();
    // k1 is already evaluated at wh
    for (std::size_t k = 0; k < cs; ++k) {
      eh[k] = std::exp(-nu * k2[k] * 0.5 * dt);
      tmp[k] = eh[k] * (wh[k] + 0.5 * dt * k1[k]);
    }
    nonlinear(tmp, k2s);
    for (std::size_t k = 0; k < cs; ++k) tmp[k] = eh[k] * wh[k] + 0.5 * dt * k2s[k];
    nonlinear(tmp, k3);
    for (std::size_t k = 0; k < cs; ++k) tmp[k] = eh[k] * (eh[k] * wh[k] + dt * k3[k]);
    nonlinear(tmp, k4);
    bool finite = true;
    for (std::size_t k = 0; k < cs; ++k) {
      const double e = eh[k] * eh[k];
      wh[k] = e * wh[k] + dt / 6.0 * (e * k1[k] + 2.0 * eh[k] * (k2s[k] + k3[k]) + k4[k]);
      if (!std::isfinite(wh[k].real()) || !std::isfinite(wh[k].imag())) finite = false;
    }
    if (!finite) throw std::runtime_error("SpectralSolver: non-finite vorticity (blow-up)");
  }
};

SpectralSolver::SpectralSolver(int n, double box, double nu, double dealias, bool advect)
    : impl_(std::make_unique<Impl>(n, box, nu, dealias, advect)) {}

SpectralSolver::~SpectralSolver() = default;

void SpectralSolver::load(const GridField& w) {
  if (w.n != impl_->n) throw std::invalid_argument("SpectralSolver::load: grid size mismatch");
  impl_->fft.forward(w.values.data(), impl_->wh.data());
  time_ = w.time;
  steps_ = 0;
}

GridField SpectralSolver::field() const {
  GridField w(impl_->n, impl_->box);
  w.time = time_;
  w.nu = impl_->nu;
  impl_->fft.backward(impl_->wh.data(), w.values.data());
  return w;
}

double SpectralSolver::max_velocity() {
  impl_->nonlinear(impl_->wh, impl_->k1);
  return impl_->last_umax;
}

void SpectralSolver::step(double dt) {
  impl_->nonlinear(impl_->wh, impl_->k1);
  try {
    impl_->rk4(dt);
  } catch (const std::runtime_error& e) {
    std::ostringstream os;
    os << e.what() << " at step " << steps_ << ", t = " << time_ << ", dt = " << dt
       << ", max|u| = " << impl_->last_umax;
    throw std::runtime_error(os.str());
  }
  time_ += dt;
  ++steps_;
}

double SpectralSolver::step_cfl(double cfl, double limit) {
  impl_->nonlinear(impl_->wh, impl_->k1);
  const double h = impl_->box / impl_->n;
  double dt = impl_->last_umax > 0.0 ? cfl * h / impl_->last_umax : limit;
  dt = std::min(dt, limit);
  try {
    impl_->rk4(dt);
  } catch (const std::runtime_error& e) {
    std::ostringstream os;
    os << e.what() << " at step " << steps_ << ", t = " << time_ << ", dt = " << dt
       << ", max|u| = " << impl_->last_umax;
    throw std::runtime_error(os.str());
  }
  time_ += dt;
  ++steps_;
  return dt;
}

GridField run_solver(const GridField& initial, const SolverConfig& cfg, const Probe& probe, RunStats* stats) {
  SpectralSolver s(initial.n, initial.box, cfg.nu, cfg.dealias, cfg.advect);
  s.load(initial);
  RunStats st;
  st.min_dt = 1e300;
  auto check_tail = [&](const GridField& w) {
    const double f = spectral_tail_fraction(w, cfg.dealias);
    st.max_tail_fraction = std::max(st.max_tail_fraction, f);
  };
  if (probe) {
    probe(initial, 0);
    check_tail(initial);
  }
  std::vector<double> outs = cfg.output_times;
  std::sort(outs.begin(), outs.end());
  std::size_t next = 0;
  while (next < outs.size() && outs[next] <= initial.time) ++next;
  const double tend = cfg.t_end;
  const double eps_t = 1e-12 * std::max(1.0, std::abs(tend));
  GridField last = initial;
  bool ended = tend - s.time() <= eps_t;
  while (!ended) {
    double target = tend;
    if (next < outs.size()) target = std::min(target, outs[next]);
    double limit = target - s.time();
    if (cfg.dt_max > 0.0) limit = std::min(limit, cfg.dt_max);
    const double dt = s.step_cfl(cfg.cfl, limit);
    st.min_dt = std::min(st.min_dt, dt);
    st.max_dt = std::max(st.max_dt, dt);
    bool hit = false;
    if (next < outs.size() && std::abs(outs[next] - s.time()) <= eps_t) {
      hit = true;
      ++next;
    }
    ended = tend - s.time() <= eps_t;
    const bool stride = cfg.output_stride > 0 && s.steps() % cfg.output_stride == 0;
    if (probe && (hit || stride || ended)) {
      GridField w = s.field();
      check_tail(w);
      probe(w, s.steps());
    }
  }
  last = s.field();
  st.steps = s.steps();
  if (st.steps == 0) st.min_dt = 0.0;
  if (st.max_tail_fraction > 1e-10)
  {
    std::ostringstream os;
    os << "resolution: last-octave energy fraction " << std::setprecision(3) << st.max_tail_fraction
       << " exceeds 1e-10";
    st.warnings.push_back(os.str());
  }
  if (stats) *stats = st;
  return last;
}

void write_checkpoint(const GridField& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(w.values.data()), static_cast<std::streamsize>(w.values.size() * 8));
  } else {
    for (double v : w.values) {
      unsigned char b[8];
      std::memcpy(b, &v, 8);
      std::reverse(b, b + 8);
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!out) throw std::runtime_error("write_checkpoint: write failed for " + path);
  nlohmann::json meta = {{"schema", "vortexlab.checkpoint/1"}, {"n", w.n},      {"box", w.box},
                         {"time", w.time},                       {"nu", w.nu},    {"dtype", "float64-le"},
                         {"layout", "row-major, index j*n+i, x = -box/2 + i*box/n"}};
  std::ofstream side(path + ".json");
  side << std::setprecision(17) << meta.dump(2) << "\n";
  if (!side) throw std::runtime_error("write_checkpoint: cannot write sidecar for " + path);
}

GridField read_checkpoint(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("read_checkpoint: missing sidecar " + path + ".json");
  nlohmann::json meta = nlohmann::json::parse(side);
  if (meta.value("schema", "") != "vortexlab.checkpoint/1")
    throw std::runtime_error("read_checkpoint: unsupported schema in " + path + ".json");
  GridField w(meta.at("n").get<int>(), meta.at("box").get<double>());
  w.time = meta.at("time").get<double>();
  w.nu = meta.at("nu").get<double>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  for (double& v : w.values) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if constexpr (std::endian::native != std::endian::little) std::reverse(b, b + 8);
    std::memcpy(&v, b, 8);
  }
  if (!in) throw std::runtime_error("read_checkpoint: truncated data in " + path);
  return w;
}

}  // namespace vortexlab

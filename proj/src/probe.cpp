#include "phaselim/probe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "phaselim/numfmt.hpp"

namespace phaselim::probe {

namespace {

constexpr int kMaxCutoff = 4096;
constexpr double kExplicitTol = 1e-10;

// Number distribution carried until the omitted tail is <= tail_tol. The returned
// length L certifies sum_{n >= L} p_n <= tail_tol.
Eigen::VectorXd number_distribution(const ProbeSpec& spec, double tail_tol) {
  if (const auto* f = std::get_if<FockProbe>(&spec.value)) {
    Eigen::VectorXd pn = Eigen::VectorXd::Zero(f->n + 1);
    pn(f->n) = 1.0;
    return pn;
  }
  if (const auto* e = std::get_if<ExplicitProbe>(&spec.value))
    return e->c.diagonal().real();

  std::vector<double> p;
  double cum = 0.0;
  if (const auto* c = std::get_if<CoherentProbe>(&spec.value)) {
    const double nbar = std::norm(c->alpha);
    double cur = std::exp(-nbar);
    for (int n = 0; n <= kMaxCutoff; ++n) {
      p.push_back(cur);
      cum += cur;
      if (1.0 - cum <= tail_tol) return Eigen::Map<Eigen::VectorXd>(p.data(), p.size());
      cur *= nbar / (n + 1);
    }
  } else if (const auto* s = std::get_if<SqueezedVacuumProbe>(&spec.value)) {
    const double t2 = std::pow(std::tanh(s->r), 2);
    double cur = 1.0 / std::cosh(s->r);
    for (int k = 0; 2 * k <= kMaxCutoff; ++k) {
      p.push_back(cur);
      cum += cur;
      if (1.0 - cum <= tail_tol) return Eigen::Map<Eigen::VectorXd>(p.data(), p.size());
      p.push_back(0.0);
      cur *= t2 * (2 * k + 1) / (2 * k + 2);
    }
  } else {
    const auto& t = std::get<ThermalProbe>(spec.value);
    const double q = t.nbar / (1.0 + t.nbar);
    double cur = 1.0 / (1.0 + t.nbar);
    for (int n = 0; n <= kMaxCutoff; ++n) {
      p.push_back(cur);
      cum += cur;
      if (1.0 - cum <= tail_tol) return Eigen::Map<Eigen::VectorXd>(p.data(), p.size());
      cur *= q;
    }
  }
  throw CutoffOverflow("probe number distribution does not reach tail tolerance " +
                       detail::format_double(tail_tol) + " below n = 4096");
}

void validate_explicit(const Eigen::MatrixXcd& c) {
  if (c.rows() != c.cols() || c.rows() == 0)
    throw ConfigError("explicit probe matrix must be square and non-empty");
  if ((c - c.adjoint()).cwiseAbs().maxCoeff() > kExplicitTol)
    throw ConfigError("explicit probe matrix is not Hermitian");
  if (std::abs(c.trace().real() - 1.0) > kExplicitTol ||
      std::abs(c.trace().imag()) > kExplicitTol)
    throw ConfigError("explicit probe matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kExplicitTol)
    throw ConfigError("explicit probe matrix is not positive semidefinite");
}

Complex parse_complex(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }),
          s.end());
  if (s.empty()) throw ConfigError("empty complex literal");
  const auto to_real = [](const std::string& part) -> double {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("invalid numeric literal '" + part + "'");
    }
  };
  const char last = s.back();
  if (last == 'i' || last == 'j') {
    s.pop_back();
    for (std::size_t i = s.size(); i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
        return {to_real(s.substr(0, i)), to_real(s.substr(i))};
    }
    return {0.0, to_real(s)};
  }
  return {to_real(s), 0.0};
}

}  // namespace

ProbeSpec ProbeSpec::fock(int n) {
  if (n < 0) throw ConfigError("fock probe photon number must be >= 0");
  return {FockProbe{n}};
}

ProbeSpec ProbeSpec::coherent(Complex alpha) { return {CoherentProbe{alpha}}; }

ProbeSpec ProbeSpec::squeezed_vacuum(double r) {
  if (!std::isfinite(r)) throw ConfigError("squeezing parameter must be finite");
  return {SqueezedVacuumProbe{r}};
}

ProbeSpec ProbeSpec::thermal(double nbar) {
  if (!(nbar >= 0.0)) throw ConfigError("thermal occupation must be >= 0");
  return {ThermalProbe{nbar}};
}

ProbeSpec ProbeSpec::explicit_matrix(Eigen::MatrixXcd c) {
  validate_explicit(c);
  return {ExplicitProbe{std::move(c)}};
}

bool is_pure(const ProbeSpec& spec) {
  return std::holds_alternative<FockProbe>(spec.value) ||
         std::holds_alternative<CoherentProbe>(spec.value) ||
         std::holds_alternative<SqueezedVacuumProbe>(spec.value);
}

PhotonStats photon_stats(const ProbeSpec& spec) {
  PhotonStats stats;
  stats.pn = number_distribution(spec, 1e-12);
  if (const auto* f = std::get_if<FockProbe>(&spec.value)) {
    stats.nbar = f->n;
    stats.var = 0.0;
  } else if (const auto* c = std::get_if<CoherentProbe>(&spec.value)) {
    stats.nbar = std::norm(c->alpha);
    stats.var = stats.nbar;
  } else if (const auto* s = std::get_if<SqueezedVacuumProbe>(&spec.value)) {
    stats.nbar = std::pow(std::sinh(s->r), 2);
    stats.var = 2.0 * stats.nbar * (stats.nbar + 1.0);
  } else if (const auto* t = std::get_if<ThermalProbe>(&spec.value)) {
    stats.nbar = t->nbar;
    stats.var = t->nbar * (t->nbar + 1.0);
  } else {
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index n = 0; n < stats.pn.size(); ++n) {
      m1 += static_cast<double>(n) * stats.pn(n);
      m2 += static_cast<double>(n) * static_cast<double>(n) * stats.pn(n);
    }
    stats.nbar = m1;
    stats.var = m2 - m1 * m1;
  }
  return stats;
}

ProbeSpec phase_average(const ProbeSpec& spec) {
  if (std::holds_alternative<FockProbe>(spec.value)) return spec;
  if (const auto* e = std::get_if<ExplicitProbe>(&spec.value)) {
    Eigen::MatrixXcd diag = e->c.diagonal().asDiagonal();
    return ProbeSpec::explicit_matrix(std::move(diag));
  }
  const Eigen::VectorXd pn = number_distribution(spec, 1e-13);
  Eigen::MatrixXcd diag = pn.cast<Complex>().asDiagonal();
  return ProbeSpec::explicit_matrix(std::move(diag));
}

fock::FockCutoff auto_cutoff(const ProbeSpec& spec, double tail_tol) {
  if (const auto* e = std::get_if<ExplicitProbe>(&spec.value)) {
    const Eigen::VectorXd diag = e->c.diagonal().real();
    double tail = 0.0;
    int n_max = static_cast<int>(diag.size());
    for (Eigen::Index n = diag.size(); n-- > 0;) {
      if (tail + diag(n) > tail_tol) break;
      tail += diag(n);
      n_max = static_cast<int>(n);
    }
    return {n_max, tail_tol};
  }
  const Eigen::VectorXd pn = number_distribution(spec, tail_tol);
  return {static_cast<int>(pn.size()), tail_tol};
}

fock::TwoModeState build_state(const ProbeSpec& spec, const fock::FockCutoff& cutoff) {
  const int d = cutoff.dim();

  if (const auto* f = std::get_if<FockProbe>(&spec.value)) {
    if (f->n > cutoff.n_max)
      throw CutoffOverflow("fock probe photon number exceeds the cutoff");
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(d, d);
    amp(f->n, 0) = 1.0;
    return fock::TwoModeState::pure(std::move(amp), cutoff);
  }

  if (const auto* c = std::get_if<CoherentProbe>(&spec.value)) {
    Eigen::VectorXcd col(d);
    col(0) = std::exp(-0.5 * std::norm(c->alpha));
    for (int n = 0; n + 1 < d; ++n) col(n + 1) = col(n) * c->alpha / std::sqrt(n + 1.0);
    const double kept = col.squaredNorm();
    if (1.0 - kept > cutoff.tail_tol)
      throw CutoffOverflow("coherent probe: clipped mass " +
                           detail::format_double(1.0 - kept) + " exceeds tail_tol");
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(d, d);
    amp.col(0) = col / std::sqrt(kept);
    return fock::TwoModeState::pure(std::move(amp), cutoff);
  }

  if (const auto* s = std::get_if<SqueezedVacuumProbe>(&spec.value)) {
    Eigen::VectorXd col = fock::squeeze_matrix(s->r, d).col(0);
    const double kept = col.squaredNorm();
    const Eigen::VectorXd pn = number_distribution(spec, 1e-14);
    double clipped = 0.0;
    for (Eigen::Index n = d; n < pn.size(); ++n) clipped += pn(n);
    if (clipped > cutoff.tail_tol)
      throw CutoffOverflow("squeezed probe: clipped mass " +
                           detail::format_double(clipped) + " exceeds tail_tol");
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(d, d);
    amp.col(0) = (col / std::sqrt(kept)).cast<Complex>();
    return fock::TwoModeState::pure(std::move(amp), cutoff);
  }

  Eigen::MatrixXcd block;
  if (std::holds_alternative<ThermalProbe>(spec.value)) {
    const Eigen::VectorXd pn = number_distribution(spec, 1e-14);
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(d);
    double clipped = 0.0;
    for (Eigen::Index n = 0; n < pn.size(); ++n) {
      if (n < d)
        diag(n) = pn(n);
      else
        clipped += pn(n);
    }
    if (clipped > cutoff.tail_tol)
      throw CutoffOverflow("thermal probe: clipped mass " +
                           detail::format_double(clipped) + " exceeds tail_tol");
    block = diag.asDiagonal();
  } else {
    const auto& e = std::get<ExplicitProbe>(spec.value);
    validate_explicit(e.c);
    const int dc = static_cast<int>(e.c.rows());
    if (dc > d) {
      const double clipped = 1.0 - e.c.topLeftCorner(d, d).trace().real();
      if (clipped > cutoff.tail_tol)
        throw CutoffOverflow("explicit probe: clipped mass " +
                             detail::format_double(clipped) + " exceeds tail_tol");
      block = e.c.topLeftCorner(d, d);
    } else {
      block = Eigen::MatrixXcd::Zero(d, d);
      block.topLeftCorner(dc, dc) = e.c;
    }
  }
  block /= block.trace().real();

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int ap = 0; ap < d; ++ap) rho(a * d, ap * d) = block(a, ap);
  return fock::TwoModeState::mixed(std::move(rho), cutoff);
}

std::string to_string(const ProbeSpec& spec) {
  if (const auto* f = std::get_if<FockProbe>(&spec.value))
    return "fock:n=" + std::to_string(f->n);
  if (const auto* c = std::get_if<CoherentProbe>(&spec.value))
    return "coherent:alpha=" + detail::format_complex(c->alpha);
  if (const auto* s = std::get_if<SqueezedVacuumProbe>(&spec.value))
    return "squeezed:r=" + detail::format_double(s->r);
  if (const auto* t = std::get_if<ThermalProbe>(&spec.value))
    return "thermal:nbar=" + detail::format_double(t->nbar);
  return "explicit:dim=" + std::to_string(std::get<ExplicitProbe>(spec.value).c.rows());
}

ProbeSpec parse_probe(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<std::pair<std::string, std::string>> kv;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("probe parameter '" + item + "' is not key=value");
      kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  const auto get = [&](const std::string& key) -> const std::string* {
    for (const auto& [k, v] : kv)
      if (k == key) return &v;
    return nullptr;
  };
  const auto require = [&](const std::string& key) -> const std::string& {
    const std::string* v = get(key);
    if (!v) throw ConfigError("probe '" + kind + "' requires parameter '" + key + "'");
    return *v;
  };
  const auto as_double = [&](const std::string& s) {
    const Complex z = parse_complex(s);
    if (z.imag() != 0.0) throw ConfigError("expected a real number, got '" + s + "'");
    return z.real();
  };

  if (kind == "fock") return ProbeSpec::fock(static_cast<int>(as_double(require("n"))));
  if (kind == "coherent") return ProbeSpec::coherent(parse_complex(require("alpha")));
  if (kind == "squeezed" || kind == "squeezed_vacuum") {
    if (const std::string* r = get("r")) return ProbeSpec::squeezed_vacuum(as_double(*r));
    const double nbar = as_double(require("nbar"));
    if (nbar < 0.0) throw ConfigError("squeezed probe nbar must be >= 0");
    return ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(nbar)));
  }
  if (kind == "thermal") return ProbeSpec::thermal(as_double(require("nbar")));
  throw ConfigError("unknown probe kind '" + kind + "'");
}

void to_json(nlohmann::json& j, const ProbeSpec& spec) {
  if (const auto* f = std::get_if<FockProbe>(&spec.value)) {
    j = {{"kind", "fock"}, {"n", f->n}};
  } else if (const auto* c = std::get_if<CoherentProbe>(&spec.value)) {
    j = {{"kind", "coherent"},
         {"alpha", {{"re", c->alpha.real()}, {"im", c->alpha.imag()}}}};
  } else if (const auto* s = std::get_if<SqueezedVacuumProbe>(&spec.value)) {
    j = {{"kind", "squeezed"}, {"r", s->r}};
  } else if (const auto* t = std::get_if<ThermalProbe>(&spec.value)) {
    j = {{"kind", "thermal"}, {"nbar", t->nbar}};
  } else {
    const auto& c = std::get<ExplicitProbe>(spec.value).c;
    std::vector<std::vector<double>> re(c.rows()), im(c.rows());
    for (Eigen::Index a = 0; a < c.rows(); ++a)
      for (Eigen::Index b = 0; b < c.cols(); ++b) {
        re[a].push_back(c(a, b).real());
        im[a].push_back(c(a, b).imag());
      }
    j = {{"kind", "explicit"}, {"re", re}, {"im", im}};
  }
}

void from_json(const nlohmann::json& j, ProbeSpec& spec) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("probe must be an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const auto number = [&](const char* key) -> double {
    if (!j.contains(key) || !j.at(key).is_number())
      throw ConfigError(std::string("probe field '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  if (kind == "fock") {
    spec = ProbeSpec::fock(static_cast<int>(number("n")));
  } else if (kind == "coherent") {
    if (!j.contains("alpha")) throw ConfigError("coherent probe requires 'alpha'");
    const auto& a = j.at("alpha");
    Complex alpha;
    if (a.is_number())
      alpha = a.get<double>();
    else if (a.is_string())
      alpha = parse_complex(a.get<std::string>());
    else if (a.is_object())
      alpha = {a.value("re", 0.0), a.value("im", 0.0)};
    else
      throw ConfigError("coherent 'alpha' must be a number, string, or {re, im}");
    spec = ProbeSpec::coherent(alpha);
  } else if (kind == "squeezed" || kind == "squeezed_vacuum") {
    if (j.contains("r"))
      spec = ProbeSpec::squeezed_vacuum(number("r"));
    else
      spec = ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(number("nbar"))));
  } else if (kind == "thermal") {
    spec = ProbeSpec::thermal(number("nbar"));
  } else if (kind == "explicit") {
    if (!j.contains("re") || !j.at("re").is_array())
      throw ConfigError("explicit probe requires a 're' matrix");
    const auto rows = j.at("re").get<std::vector<std::vector<double>>>();
    const std::size_t n = rows.size();
    Eigen::MatrixXcd c(n, n);
    std::vector<std::vector<double>> irows;
    if (j.contains("im")) irows = j.at("im").get<std::vector<std::vector<double>>>();
    for (std::size_t a = 0; a < n; ++a) {
      if (rows[a].size() != n || (!irows.empty() && irows[a].size() != n))
        throw ConfigError("explicit probe matrix must be square");
      for (std::size_t b = 0; b < n; ++b)
        c(a, b) = {rows[a][b], irows.empty() ? 0.0 : irows[a][b]};
    }
    spec = ProbeSpec::explicit_matrix(std::move(c));
  } else {
    throw ConfigError("unknown probe kind '" + kind + "'");
  }
}

}  // namespace phaselim::probe

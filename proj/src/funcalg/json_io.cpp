#include "fcalc/funcalg/json_io.hpp"

namespace fcalc::io {

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("complex value must be a number or [re, im]");
}

json to_json(const SmoothFunction& f) {
  const SmoothNode& n = f.node();
  json j;
  j["type"] = n.kind();
  if (auto b = dynamic_cast<const nodes::Bump*>(&n)) {
    j["center"] = b->center;
    j["halfwidth"] = b->halfwidth;
  } else if (auto p = dynamic_cast<const nodes::Plateau*>(&n)) {
    j["a"] = p->a;
    j["b"] = p->b;
    j["ramp"] = p->ramp;
  } else if (auto q = dynamic_cast<const nodes::Polynomial*>(&n)) {
    j["center"] = q->center;
    j["coeffs"] = json::array();
    for (auto c : q->coeffs) j["coeffs"].push_back(complex_to_json(c));
  } else if (auto k = dynamic_cast<const nodes::Pole*>(&n)) {
    j["zeta"] = complex_to_json(k->zeta);
    j["order"] = k->order;
  } else if (auto pr = dynamic_cast<const nodes::Product*>(&n)) {
    j["factors"] = json::array();
    for (const auto& g : pr->factors) j["factors"].push_back(to_json(g));
  } else if (auto s = dynamic_cast<const nodes::Sum*>(&n)) {
    j["terms"] = json::array();
    for (const auto& g : s->terms) j["terms"].push_back(to_json(g));
  } else if (auto sc = dynamic_cast<const nodes::Scale*>(&n)) {
    j["factor"] = complex_to_json(sc->factor);
    j["inner"] = to_json(sc->inner);
  } else if (auto sh = dynamic_cast<const nodes::Shift*>(&n)) {
    j["offset"] = sh->offset;
    j["inner"] = to_json(sh->inner);
  } else if (auto t = dynamic_cast<const nodes::Tabulated*>(&n)) {
    j["x0"] = t->x0;
    j["dx"] = t->dx;
    j["order"] = t->order;
    j["jets"] = json::array();
    for (const auto& row : t->jets) {
      json r = json::array();
      for (auto c : row) r.push_back(complex_to_json(c));
      j["jets"].push_back(std::move(r));
    }
    j["support"] = json::array();
    for (const auto& iv : t->supp.parts()) j["support"].push_back({iv.lo, iv.hi});
  }
  return j;
}

SmoothFunction smooth_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") return {};
  if (type == "bump")
    return SmoothFunction::bump(j.at("center").get<double>(), j.at("halfwidth").get<double>());
  if (type == "plateau")
    return SmoothFunction::plateau(j.at("a").get<double>(), j.at("b").get<double>(),
                                   j.at("ramp").get<double>());
  if (type == "polynomial") {
    std::vector<cplx> c;
    for (const auto& v : j.at("coeffs")) c.push_back(complex_from_json(v));
    return SmoothFunction::polynomial(j.value("center", 0.0), std::move(c));
  }
  if (type == "pole")
    return SmoothFunction::pole(complex_from_json(j.at("zeta")), j.value("order", 1));
  if (type == "product") {
    SmoothFunction p;
    bool first = true;
    for (const auto& v : j.at("factors")) {
      p = first ? smooth_from_json(v) : multiply(p, smooth_from_json(v));
      first = false;
    }
    return p;
  }
  if (type == "sum") {
    SmoothFunction s;
    for (const auto& v : j.at("terms")) s = add(s, smooth_from_json(v));
    return s;
  }
  if (type == "scale")
    return scale(complex_from_json(j.at("factor")), smooth_from_json(j.at("inner")));
  if (type == "shift") return shift(smooth_from_json(j.at("inner")), j.at("offset").get<double>());
  if (type == "tabulated") {
    std::vector<std::vector<cplx>> jets;
    for (const auto& row : j.at("jets")) {
      std::vector<cplx> r;
      for (const auto& v : row) r.push_back(complex_from_json(v));
      jets.push_back(std::move(r));
    }
    std::vector<Interval> parts;
    for (const auto& iv : j.at("support"))
      parts.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    return SmoothFunction::tabulated(j.at("x0").get<double>(), j.at("dx").get<double>(),
                                     j.at("order").get<int>(), std::move(jets),
                                     IntervalSet(std::move(parts)));
  }
  throw DomainError("unknown function node type '" + type + "'");
}

json to_json(const EFunction& f) {
  json j;
  j["a0"] = complex_to_json(f.a0());
  j["poles"] = json::array();
  for (const auto& p : f.poles())
    j["poles"].push_back(
        {{"coeff", complex_to_json(p.coeff)}, {"zeta", complex_to_json(p.zeta)}, {"order", p.order}});
  j["compact"] = to_json(f.compact_part());
  return j;
}

EFunction efunction_from_json(const json& j) {
  if (j.contains("type")) return EFunction::compact(smooth_from_json(j));
  std::vector<PoleTerm> poles;
  if (j.contains("poles"))
    for (const auto& p : j.at("poles"))
      poles.push_back({complex_from_json(p.value("coeff", json(1.0))),
                       complex_from_json(p.at("zeta")), p.value("order", 1)});
  SmoothFunction compact;
  if (j.contains("compact")) compact = smooth_from_json(j.at("compact"));
  return EFunction(j.contains("a0") ? complex_from_json(j.at("a0")) : cplx(0.0),
                   std::move(poles), std::move(compact));
}

json to_json(const TensorFunction& f) {
  json terms = json::array();
  for (const auto& t : f.terms()) {
    json fs = json::array();
    for (const auto& g : t.factors) fs.push_back(to_json(g));
    terms.push_back({{"weight", complex_to_json(t.weight)}, {"factors", std::move(fs)}});
  }
  return {{"terms", std::move(terms)}};
}

TensorFunction tensor_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<SmoothFunction> fs;
    for (const auto& v : j) fs.push_back(smooth_from_json(v));
    return tensorize(std::move(fs));
  }
  std::vector<TensorTerm> terms;
  for (const auto& t : j.at("terms")) {
    TensorTerm term;
    term.weight = t.contains("weight") ? complex_from_json(t.at("weight")) : cplx(1.0);
    for (const auto& v : t.at("factors")) term.factors.push_back(smooth_from_json(v));
    terms.push_back(std::move(term));
  }
  return TensorFunction(std::move(terms));
}

}  // namespace fcalc::io

#include "randtest/transform.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "randtest/errors.hpp"

namespace randtest {

namespace {

constexpr int kMaxPermutationDegree = 16;  // 4 bits per position in the key
constexpr int kMaxSignFlipDegree = 20;
constexpr std::size_t kMaxWitnesses = 3;

std::uint64_t permutation_key(std::span<const std::uint8_t> image) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    key |= static_cast<std::uint64_t>(image[i]) << (4 * i);
  }
  return key;
}

}  // namespace

Transformation Transformation::permutation(std::vector<std::uint8_t> image) {
  const int n = static_cast<int>(image.size());
  if (n < 1 || n > kMaxPermutationDegree) {
    throw InvalidArgument("Transformation: permutation degree must be in [1, 16]");
  }
  std::uint32_t seen = 0;
  for (const std::uint8_t v : image) {
    if (v >= n) throw InvalidArgument("Transformation: permutation index out of range");
    seen |= 1u << v;
  }
  if (seen != (1u << n) - 1) {
    throw InvalidArgument("Transformation: image is not a permutation");
  }
  Transformation t;
  t.kind_ = Kind::permutation;
  t.n_ = n;
  t.image_ = std::move(image);
  return t;
}

Transformation Transformation::sign_flip(std::uint64_t negate_mask, int n) {
  if (n < 1 || n > kMaxSignFlipDegree) {
    throw InvalidArgument("Transformation: sign-flip degree must be in [1, 20]");
  }
  if ((negate_mask >> n) != 0) {
    throw InvalidArgument("Transformation: sign bits set beyond position n");
  }
  Transformation t;
  t.kind_ = Kind::sign_flip;
  t.n_ = n;
  t.mask_ = negate_mask;
  return t;
}

Transformation Transformation::identity(Kind kind, int n) {
  if (kind == Kind::sign_flip) return sign_flip(0, n);
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), std::uint8_t{0});
  return permutation(std::move(image));
}

bool Transformation::is_identity() const {
  if (kind_ == Kind::sign_flip) return mask_ == 0;
  for (int i = 0; i < n_; ++i) {
    if (image_[static_cast<std::size_t>(i)] != i) return false;
  }
  return true;
}

void Transformation::apply_into(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(out.size()) != n_) {
    throw InvalidArgument("Transformation: length mismatch");
  }
  if (kind_ == Kind::permutation) {
    for (int i = 0; i < n_; ++i) out[i] = x[image_[static_cast<std::size_t>(i)]];
  } else {
    for (int i = 0; i < n_; ++i) out[i] = ((mask_ >> i) & 1u) ? -x[i] : x[i];
  }
}

std::vector<double> Transformation::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  apply_into(x, out);
  return out;
}

Transformation Transformation::compose(const Transformation& inner) const {
  if (kind_ != inner.kind_ || n_ != inner.n_) {
    throw InvalidArgument("Transformation: compose requires one kind and length");
  }
  if (kind_ == Kind::sign_flip) return sign_flip(mask_ ^ inner.mask_, n_);
  // apply(this o inner, x) = apply(this, apply(inner, x)):
  // out[i] = inner(x)[image_[i]] = x[inner.image[image_[i]]].
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    image[static_cast<std::size_t>(i)] = inner.image_[image_[static_cast<std::size_t>(i)]];
  }
  return permutation(std::move(image));
}

Transformation Transformation::inverse() const {
  if (kind_ == Kind::sign_flip) return *this;  // self-inverse
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    image[image_[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
  }
  return permutation(std::move(image));
}

std::uint64_t Transformation::key() const {
  return kind_ == Kind::sign_flip ? mask_ : permutation_key(image_);
}

std::string Transformation::str() const {
  std::string out;
  if (kind_ == Kind::permutation) {
    out = "perm(";
    for (int i = 0; i < n_; ++i) {
      if (i) out += ",";
      out += std::to_string(image_[static_cast<std::size_t>(i)] + 1);
    }
  } else {
    out = "signs(";
    for (int i = 0; i < n_; ++i) {
      if (i) out += ",";
      out += ((mask_ >> i) & 1u) ? "-1" : "+1";
    }
  }
  return out + ")";
}

nlohmann::json Transformation::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::permutation) {
    j["kind"] = "permutation";
    auto& arr = j["image"] = nlohmann::json::array();
    for (int i = 0; i < n_; ++i) arr.push_back(image_[static_cast<std::size_t>(i)] + 1);
  } else {
    j["kind"] = "sign-flip";
    auto& arr = j["signs"] = nlohmann::json::array();
    for (int i = 0; i < n_; ++i) arr.push_back(((mask_ >> i) & 1u) ? -1 : 1);
  }
  return j;
}

Transformation Transformation::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "permutation") {
    std::vector<std::uint8_t> image;
    for (const auto& v : j.at("image")) {
      const int idx = v.get<int>();
      if (idx < 1) throw ParseError("transformation JSON: image indices are 1-based");
      image.push_back(static_cast<std::uint8_t>(idx - 1));
    }
    return permutation(std::move(image));
  }
  if (kind == "sign-flip") {
    std::uint64_t mask = 0;
    int n = 0;
    for (const auto& v : j.at("signs")) {
      const int s = v.get<int>();
      if (s != 1 && s != -1) throw ParseError("transformation JSON: signs must be +-1");
      if (s == -1) mask |= std::uint64_t{1} << n;
      ++n;
    }
    return sign_flip(mask, n);
  }
  throw ParseError("transformation JSON: kind must be 'permutation' or 'sign-flip'");
}

std::string GroupCheckReport::describe_failure() const {
  std::string msg;
  if (!has_identity) msg += "missing identity element; ";
  if (!closed) {
    msg += "not closed under composition";
    if (!closure_witnesses.empty()) {
      msg += " (witness: " + closure_witnesses.front().first.str() + " o " +
             closure_witnesses.front().second.str() + " is outside the set)";
    }
    msg += "; ";
  }
  if (!has_inverses) {
    msg += "not closed under inversion";
    if (!inverse_witnesses.empty()) {
      msg += " (witness: " + inverse_witnesses.front().str() + " has no inverse in the set)";
    }
    msg += "; ";
  }
  if (msg.size() >= 2) msg.resize(msg.size() - 2);
  return msg;
}

nlohmann::json GroupCheckReport::to_json() const {
  nlohmann::json j;
  j["is_group"] = is_group();
  j["has_identity"] = has_identity;
  j["closed"] = closed;
  j["has_inverses"] = has_inverses;
  auto& cw = j["closure_witnesses"] = nlohmann::json::array();
  for (const auto& [g, h] : closure_witnesses) {
    cw.push_back(nlohmann::json::array({g.to_json(), h.to_json()}));
  }
  auto& iw = j["missing_inverse_witnesses"] = nlohmann::json::array();
  for (const auto& g : inverse_witnesses) iw.push_back(g.to_json());
  return j;
}

GroupCheckReport GroupCheckReport::from_json(const nlohmann::json& j) {
  GroupCheckReport r;
  r.has_identity = j.at("has_identity").get<bool>();
  r.closed = j.at("closed").get<bool>();
  r.has_inverses = j.at("has_inverses").get<bool>();
  for (const auto& pair : j.at("closure_witnesses")) {
    r.closure_witnesses.emplace_back(Transformation::from_json(pair.at(0)),
                                     Transformation::from_json(pair.at(1)));
  }
  for (const auto& e : j.at("missing_inverse_witnesses")) {
    r.inverse_witnesses.push_back(Transformation::from_json(e));
  }
  return r;
}

GroupCheckReport check_group(const TransformationGroup& group) {
  const auto& elems = group.elements;
  if (elems.empty()) throw InvalidArgument("check_group: element set is empty");
  const auto kind = elems.front().kind();
  std::unordered_set<std::uint64_t> keys;
  keys.reserve(elems.size() * 2);
  for (const auto& g : elems) {
    if (g.kind() != kind || g.n() != group.n) {
      throw InvalidArgument("check_group: elements must share one kind and length");
    }
    if (!keys.insert(g.key()).second) {
      throw InvalidArgument("check_group: duplicate element " + g.str());
    }
  }

  GroupCheckReport report;
  report.has_identity = keys.contains(Transformation::identity(kind, group.n).key());

  report.has_inverses = true;
  for (const auto& g : elems) {
    if (!keys.contains(g.inverse().key())) {
      report.has_inverses = false;
      if (report.inverse_witnesses.size() < kMaxWitnesses) {
        report.inverse_witnesses.push_back(g);
      }
    }
  }

  report.closed = true;
  for (const auto& g : elems) {
    for (const auto& h : elems) {
      std::uint64_t key;
      if (kind == Transformation::Kind::sign_flip) {
        key = g.negate_mask() ^ h.negate_mask();
      } else {
        // key of g o h without building the object
        key = 0;
        const auto& gi = g.image();
        const auto& hi = h.image();
        for (int i = 0; i < group.n; ++i) {
          key |= static_cast<std::uint64_t>(hi[gi[static_cast<std::size_t>(i)]]) << (4 * i);
        }
      }
      if (!keys.contains(key)) {
        report.closed = false;
        report.closure_witnesses.emplace_back(g, h);
        if (report.closure_witnesses.size() >= kMaxWitnesses) return report;
      }
    }
  }
  return report;
}

TransformationGroup symmetric_group(int n) {
  if (n < 1) throw InvalidArgument("symmetric_group: n must be >= 1");
  if (n > 8) throw EnumerationInfeasible("symmetric_group: n > 8 is too large to enumerate");
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), std::uint8_t{0});
  TransformationGroup g;
  g.n = n;
  g.label = "perms:" + std::to_string(n);
  g.validated = true;
  do {
    g.elements.push_back(Transformation::permutation(image));
  } while (std::next_permutation(image.begin(), image.end()));
  return g;
}

TransformationGroup sign_flip_group(int n) {
  if (n < 1 || n > kMaxSignFlipDegree) {
    throw InvalidArgument("sign_flip_group: n must be in [1, 20]");
  }
  TransformationGroup g;
  g.n = n;
  g.label = "sign-flips:" + std::to_string(n);
  g.validated = true;
  const std::uint64_t count = std::uint64_t{1} << n;
  g.elements.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) {
    g.elements.push_back(Transformation::sign_flip(m, n));
  }
  return g;
}

TransformationGroup cyclic_group(const Transformation& generator) {
  TransformationGroup g;
  g.n = generator.n();
  g.label = "cyclic";
  g.validated = true;
  auto current = Transformation::identity(generator.kind(), generator.n());
  do {
    g.elements.push_back(current);
    current = generator.compose(current);
  } while (!current.is_identity());
  return g;
}

TransformationGroup balanced_permutations(int n_cases, int n_controls) {
  if (n_cases != n_controls || n_cases < 2 || n_cases % 2 != 0) {
    throw InvalidArgument("balanced_permutations: case/control counts must be equal and even");
  }
  const int n = n_cases + n_controls;
  if (n > 8) {
    throw EnumerationInfeasible("balanced_permutations: total size > 8 is too large to enumerate");
  }
  TransformationGroup g;
  g.n = n;
  g.label = "balanced-perms:" + std::to_string(n_cases) + "," + std::to_string(n_controls);
  g.validated = false;
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), std::uint8_t{0});
  do {
    // Case positions are 0..n_cases-1. Count case positions that receive a
    // control-origin value; balance demands exactly half.
    int displaced = 0;
    for (int i = 0; i < n_cases; ++i) {
      if (image[static_cast<std::size_t>(i)] >= n_cases) ++displaced;
    }
    if (displaced == n_cases / 2) {
      g.elements.push_back(Transformation::permutation(image));
    }
  } while (std::next_permutation(image.begin(), image.end()));
  return g;
}

}  // namespace randtest

#pragma once

// Words in the generators of a finitely generated group of isometries.
// Letter +(i+1) is generator i, -(i+1) its inverse.

#include <cstdlib>
#include <string>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"

namespace hypervor {

using Word = std::vector<int>;

inline Word reduce(const Word& w) {
  Word out;
  for (int x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(out);
}

// "a", "A" for the inverse, "b", ...; "1" for the empty word.
inline std::string word_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (int x : w) {
    const int g = std::abs(x) - 1;
    if (g < 26)
      s += static_cast<char>((x > 0 ? 'a' : 'A') + g);
    else
      s += (x > 0 ? "g" : "G") + std::to_string(g);
  }
  return s;
}

inline LorentzIsometry evaluate(const std::vector<LorentzIsometry>& gens,
                                const Word& w) {
  LorentzIsometry m;
  for (int x : w) {
    const std::size_t g = static_cast<std::size_t>(std::abs(x) - 1);
    if (g >= gens.size()) throw InputError("word letter out of range");
    m = m.compose(x > 0 ? gens[g] : gens[g].inverse());
  }
  return m;
}

struct GroupElement {
  Word word;
  LorentzIsometry matrix;
};

// Generators equal to the identity within tolerance are skipped, so a scene
// made only of such generators is the trivial group.
inline bool is_trivial_generator(const LorentzIsometry& g) {
  return g.is_identity(tol::kNorm);
}

// Reduced words one letter longer than those of `prev`, in a fixed order:
// generators by index, the generator before its inverse.
inline std::vector<GroupElement> extend_layer(const std::vector<LorentzIsometry>& gens,
                                              const std::vector<GroupElement>& prev) {
  std::vector<GroupElement> out;
  const int n = static_cast<int>(gens.size());
  for (const auto& e : prev)
    for (int g = 0; g < n; ++g)
      for (int sign : {1, -1}) {
        if (is_trivial_generator(gens[g])) continue;
        const int x = sign * (g + 1);
        if (!e.word.empty() && e.word.back() == -x) continue;
        GroupElement f{e.word, e.matrix.compose(sign > 0 ? gens[g] : gens[g].inverse())};
        f.word.push_back(x);
        out.push_back(std::move(f));
      }
  return out;
}

// All reduced words of length <= cap, breadth first, identity first.
inline std::vector<GroupElement> enumerate_words(const std::vector<LorentzIsometry>& gens,
                                                 int cap) {
  std::vector<GroupElement> all{{Word{}, LorentzIsometry{}}};
  std::vector<GroupElement> layer = all;
  for (int len = 1; len <= cap; ++len) {
    layer = extend_layer(gens, layer);
    if (layer.empty()) break;
    all.insert(all.end(), layer.begin(), layer.end());
  }
  return all;
}

}  // namespace hypervor

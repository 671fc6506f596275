// Words over a finite alphabet of generators, finite group presentations and
// user-supplied coset tables for finite-index subgroups.

#ifndef AFFIRR_PRESENTATION_HPP_
#define AFFIRR_PRESENTATION_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace affirr {

  struct Letter {
    std::size_t generator;
    int         sign;  // +1 or -1

    Letter inverse() const noexcept {
      return {generator, -sign};
    }
    bool operator==(Letter const&) const = default;
  };

  // A freely reduced word. Reduction happens on construction, so two words
  // are equal as group elements of the free group iff they compare equal.
  class Word {
   public:
    Word() = default;

    explicit Word(std::vector<Letter> letters) {
      for (Letter const& l : letters) {
        push_back(l);
      }
    }

    Word(std::initializer_list<Letter> letters)
        : Word(std::vector<Letter>(letters)) {}

    static Word generator(std::size_t i, int sign = 1) {
      return Word({Letter{i, sign}});
    }

    std::vector<Letter> const& letters() const noexcept {
      return _letters;
    }
    std::size_t size() const noexcept {
      return _letters.size();
    }
    bool empty() const noexcept {
      return _letters.empty();
    }
    auto begin() const noexcept {
      return _letters.begin();
    }
    auto end() const noexcept {
      return _letters.end();
    }
    Letter const& operator[](std::size_t i) const {
      return _letters[i];
    }

    std::size_t max_generator() const noexcept {
      std::size_t m = 0;
      for (auto const& l : _letters) {
        m = std::max(m, l.generator + 1);
      }
      return m;
    }

    bool operator==(Word const&) const = default;

   private:
    void push_back(Letter l) {
      if (l.sign != 1 && l.sign != -1) {
        throw std::invalid_argument("letter exponent must be +1 or -1");
      }
      if (!_letters.empty() && _letters.back() == l.inverse()) {
        _letters.pop_back();
      } else {
        _letters.push_back(l);
      }
    }

    friend Word compose(Word const& a, Word const& b);

    std::vector<Letter> _letters;
  };

  // Concatenation followed by free reduction.
  inline Word compose(Word const& a, Word const& b) {
    Word out = a;
    for (Letter const& l : b) {
      out.push_back(l);
    }
    return out;
  }

  inline Word inverse(Word const& w) {
    std::vector<Letter> out;
    out.reserve(w.size());
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
      out.push_back(it->inverse());
    }
    return Word(std::move(out));
  }

  // Replaces every letter g_i^{+-1} of w by images[i]^{+-1}.
  inline Word substitute(Word const& w, std::vector<Word> const& images) {
    Word out;
    for (Letter const& l : w) {
      if (l.generator >= images.size()) {
        throw std::out_of_range("substitute: generator index out of range");
      }
      out = compose(out, l.sign > 0 ? images[l.generator] : inverse(images[l.generator]));
    }
    return out;
  }

  inline bool is_valid_generator_name(std::string_view name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
      return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
  }

  class GroupPresentation {
   public:
    GroupPresentation() = default;

    GroupPresentation(std::vector<std::string> names, std::vector<Word> relators)
        : _names(std::move(names)), _relators(std::move(relators)) {
      for (std::size_t i = 0; i < _names.size(); ++i) {
        if (!is_valid_generator_name(_names[i])) {
          throw std::invalid_argument("invalid generator name '" + _names[i] + "'");
        }
        if (!_index.emplace(_names[i], i).second) {
          throw std::invalid_argument("duplicate generator name '" + _names[i] + "'");
        }
      }
      for (auto const& r : _relators) {
        check(r);
      }
    }

    // Presentation with relators given in the textual word syntax.
    static GroupPresentation parse(std::vector<std::string>        names,
                                   std::vector<std::string> const& relators) {
      GroupPresentation p(std::move(names), {});
      for (auto const& r : relators) {
        p._relators.push_back(p.parse_word(r));
      }
      return p;
    }

    // The free group on the given generators.
    static GroupPresentation free(std::vector<std::string> names) {
      return GroupPresentation(std::move(names), {});
    }

    std::size_t generator_count() const noexcept {
      return _names.size();
    }
    std::vector<std::string> const& generator_names() const noexcept {
      return _names;
    }
    std::vector<Word> const& relators() const noexcept {
      return _relators;
    }

    std::size_t index_of(std::string_view name) const {
      auto it = _index.find(std::string(name));
      if (it == _index.end()) {
        throw std::out_of_range("unknown generator '" + std::string(name) + "'");
      }
      return it->second;
    }

    // Throws std::out_of_range if w mentions an undeclared generator.
    void check(Word const& w) const {
      if (w.max_generator() > _names.size()) {
        throw std::out_of_range("word references generator index "
                                + std::to_string(w.max_generator() - 1)
                                + " but the presentation has "
                                + std::to_string(_names.size()) + " generators");
      }
    }

    Word compose(Word const& a, Word const& b) const {
      check(a);
      check(b);
      return affirr::compose(a, b);
    }

    // Whitespace-separated tokens, each "name" or "name^-1"; "1" is the
    // empty word.
    Word parse_word(std::string_view text) const {
      std::istringstream  in{std::string(text)};
      std::string         tok;
      std::vector<Letter> letters;
      bool                seen_one = false;
      std::size_t         count = 0;
      while (in >> tok) {
        ++count;
        if (tok == "1") {
          seen_one = true;
          continue;
        }
        int  sign = 1;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
          if (tok.substr(caret) != "^-1") {
            throw std::invalid_argument("bad token '" + tok + "' (expected name or name^-1)");
          }
          sign = -1;
          tok.resize(caret);
        }
        letters.push_back({index_of(tok), sign});
      }
      if (seen_one && count != 1) {
        throw std::invalid_argument("the empty word '1' must appear alone");
      }
      if (count == 0) {
        throw std::invalid_argument("empty word text (use \"1\" for the identity)");
      }
      return Word(std::move(letters));
    }

    std::string format_word(Word const& w) const {
      check(w);
      if (w.empty()) {
        return "1";
      }
      std::string out;
      for (auto const& l : w) {
        if (!out.empty()) {
          out += ' ';
        }
        out += _names[l.generator];
        if (l.sign < 0) {
          out += "^-1";
        }
      }
      return out;
    }

    bool operator==(GroupPresentation const& other) const {
      return _names == other._names && _relators == other._relators;
    }

   private:
    std::vector<std::string>                     _names;
    std::vector<Word>                            _relators;
    std::unordered_map<std::string, std::size_t> _index;
  };

  ////////////////////////////////////////////////////////////////////////
  // Presentation shapes
  ////////////////////////////////////////////////////////////////////////

  namespace detail {
    // If some cyclic rotation of r (or of r^-1) reads a b a^-1 b^-1 w with
    // {a, b} = {g_i, g_j}, i < j, and w only uses generators of index
    // > min_tail(i, j), records the pair.
    template <typename TailOk>
    bool match_commutator(Word const& r, std::size_t& i, std::size_t& j, TailOk tail_ok) {
      for (Word const& w : {r, inverse(r)}) {
        auto const&  ls = w.letters();
        std::size_t n = ls.size();
        if (n < 4) {
          continue;
        }
        for (std::size_t rot = 0; rot < n; ++rot) {
          auto at = [&](std::size_t k) {
            return ls[(rot + k) % n];
          };
          Letter a = at(0), b = at(1);
          if (a.sign != 1 || b.sign != 1 || a.generator == b.generator) {
            continue;
          }
          if (!(at(2) == a.inverse() && at(3) == b.inverse())) {
            continue;
          }
          std::size_t lo = std::min(a.generator, b.generator);
          std::size_t hi = std::max(a.generator, b.generator);
          bool        ok = true;
          for (std::size_t k = 4; k < n && ok; ++k) {
            ok = tail_ok(at(k).generator, hi);
          }
          if (ok) {
            i = lo;
            j = hi;
            return true;
          }
        }
      }
      return false;
    }
  }  // namespace detail

  // Every relator is a commutator [g_i, g_j] of distinct generators, and every
  // pair of generators has one: the presentation of Z^k.
  inline bool is_free_abelian(GroupPresentation const& p) {
    std::size_t const k = p.generator_count();
    std::vector<char> seen(k * k, 0);
    for (auto const& r : p.relators()) {
      std::size_t i = 0, j = 0;
      bool        ok = r.size() == 4
                && detail::match_commutator(r, i, j, [](std::size_t, std::size_t) {
                     return false;
                   });
      if (!ok) {
        return false;
      }
      seen[i * k + j] = 1;
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (!seen[i * k + j]) {
          return false;
        }
      }
    }
    return true;
  }

  // Every pair of generators has a commutator relator; other relators are
  // allowed, so this covers quotients of Z^k as well.
  inline bool has_abelian_shape(GroupPresentation const& p) {
    std::size_t const k = p.generator_count();
    std::vector<char> seen(k * k, 0);
    for (auto const& r : p.relators()) {
      std::size_t i = 0, j = 0;
      if (detail::match_commutator(r, i, j, [](std::size_t, std::size_t) {
            return false;
          })) {
        seen[i * k + j] = 1;
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (!seen[i * k + j]) {
          return false;
        }
      }
    }
    return true;
  }

  // Sufficient syntactic criterion for nilpotence: for every pair i < j of
  // generators some relator reads [g_i, g_j] = w with w a word in generators
  // of index > j. Then <g_m, ..., g_k> is a central series. Additional
  // relators are allowed (quotients of nilpotent groups are nilpotent).
  inline bool has_nilpotent_shape(GroupPresentation const& p) {
    std::size_t const k = p.generator_count();
    std::vector<char> seen(k * k, 0);
    for (auto const& r : p.relators()) {
      std::size_t i = 0, j = 0;
      if (detail::match_commutator(r, i, j, [](std::size_t g, std::size_t hi) {
            return g > hi;
          })) {
        seen[i * k + j] = 1;
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (!seen[i * k + j]) {
          return false;
        }
      }
    }
    return true;
  }

  ////////////////////////////////////////////////////////////////////////
  // Coset tables
  ////////////////////////////////////////////////////////////////////////

  // Left cosets r_x H of a finite-index subgroup H. Conventions:
  //   s r_x = r_{action[s][x]} u_{s,x},   u_{s,x} = schreier[s][x] in H,
  // transversal[0] is the empty word and r_x . 0 = x.
  struct CosetTable {
    std::size_t                    cosets = 1;
    std::vector<Word>              transversal;  // ambient generators
    std::vector<std::vector<std::size_t>> action;  // per ambient generator
    std::vector<std::vector<Word>> schreier;     // subgroup generators

    bool operator==(CosetTable const&) const = default;
  };

  struct CheckResult {
    std::string name;
    bool        passed;
    std::string detail;
  };

  struct CosetTableReport {
    std::vector<CheckResult> checks;

    bool passed() const {
      return std::all_of(checks.begin(), checks.end(), [](auto const& c) {
        return c.passed;
      });
    }
  };

  // Image of coset x under the word w, acting on the left.
  inline std::size_t act_on_coset(CosetTable const& ct, Word const& w, std::size_t x) {
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
      auto const& perm = ct.action.at(it->generator);
      if (it->sign > 0) {
        x = perm.at(x);
      } else {
        auto pos = std::find(perm.begin(), perm.end(), x);
        if (pos == perm.end()) {
          throw std::out_of_range("coset permutation is not a bijection");
        }
        x = static_cast<std::size_t>(pos - perm.begin());
      }
    }
    return x;
  }

  // Checks the combinatorial invariants of ct with respect to p. Schreier
  // words are only checked structurally; their correctness is validated
  // numerically by the constructions that consume them.
  inline CosetTableReport validate_coset_table(GroupPresentation const& p,
                                               CosetTable const&        ct) {
    CosetTableReport rep;
    auto             add = [&](std::string name, bool ok, std::string detail = {}) {
      rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    std::size_t const n = ct.cosets;
    std::size_t const k = p.generator_count();

    bool shape = n >= 1 && ct.transversal.size() == n && ct.action.size() == k
                 && ct.schreier.size() == k;
    std::string why;
    if (n < 1) {
      why = "coset count must be >= 1";
    } else if (ct.transversal.size() != n) {
      why = "transversal has " + std::to_string(ct.transversal.size()) + " entries, expected "
            + std::to_string(n);
    } else if (ct.action.size() != k) {
      why = "action lists " + std::to_string(ct.action.size()) + " permutations, expected "
            + std::to_string(k);
    } else if (ct.schreier.size() != k) {
      why = "schreier lists " + std::to_string(ct.schreier.size()) + " rows, expected "
            + std::to_string(k);
    }
    for (std::size_t s = 0; shape && s < k; ++s) {
      if (ct.action[s].size() != n || ct.schreier[s].size() != n) {
        shape = false;
        why = "row for generator " + p.generator_names()[s] + " has wrong length";
      }
    }
    for (std::size_t x = 0; shape && x < n; ++x) {
      if (ct.transversal[x].max_generator() > k) {
        shape = false;
        why = "transversal word " + std::to_string(x) + " references an unknown generator";
      }
    }
    add("structure", shape, why);
    if (!shape) {
      return rep;
    }

    bool bij = true;
    for (std::size_t s = 0; s < k && bij; ++s) {
      std::vector<char> hit(n, 0);
      for (std::size_t x = 0; x < n; ++x) {
        std::size_t y = ct.action[s][x];
        if (y >= n || hit[y]) {
          bij = false;
          why = "permutation for " + p.generator_names()[s] + " is not a bijection";
          break;
        }
        hit[y] = 1;
      }
    }
    add("bijection", bij, bij ? "" : why);
    if (!bij) {
      return rep;
    }

    bool rel_ok = true;
    for (std::size_t r = 0; r < p.relators().size() && rel_ok; ++r) {
      for (std::size_t x = 0; x < n; ++x) {
        if (act_on_coset(ct, p.relators()[r], x) != x) {
          rel_ok = false;
          why = "relator '" + p.format_word(p.relators()[r]) + "' moves coset "
                + std::to_string(x);
          break;
        }
      }
    }
    add("relators", rel_ok, rel_ok ? "" : why);

    std::vector<char>        reached(n, 0);
    std::vector<std::size_t> stack{0};
    reached[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t s = 0; s < k; ++s) {
        std::size_t y = ct.action[s][x];
        if (!reached[y]) {
          reached[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    add("transitivity", count == n,
        count == n ? "" : "orbit of coset 0 has size " + std::to_string(count));

    bool tr_ok = ct.transversal[0].empty();
    why = tr_ok ? "" : "transversal[0] must be the empty word";
    for (std::size_t x = 1; x < n && tr_ok; ++x) {
      if (act_on_coset(ct, ct.transversal[x], 0) != x) {
        tr_ok = false;
        why = "transversal word " + std::to_string(x) + " does not map coset 0 to "
              + std::to_string(x);
      }
    }
    add("transversal", tr_ok, why);
    return rep;
  }

}  // namespace affirr

#endif  // AFFIRR_PRESENTATION_HPP_

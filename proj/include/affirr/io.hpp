// Problem files: JSON documents describing a presentation, a
// representation and cocycle, plus optional subgroup, coset and tolerance
// data. Matrices are flat row-major arrays; complex entries are [re, im].

#ifndef AFFIRR_IO_HPP_
#define AFFIRR_IO_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "affine.hpp"
#include "constructions.hpp"
#include "presentation.hpp"
#include "repcoh.hpp"

namespace affirr::io {

  using json = nlohmann::json;

  // Syntax errors carry line and column (1-based); semantic errors carry the
  // JSON path of the offending value and line = column = 0.
  class ParseError : public std::runtime_error {
   public:
    ParseError(std::string const& msg, std::size_t line, std::size_t column, std::string path)
        : std::runtime_error(format(msg, line, column, path)),
          _line(line),
          _column(column),
          _path(std::move(path)) {}

    std::size_t line() const noexcept {
      return _line;
    }
    std::size_t column() const noexcept {
      return _column;
    }
    std::string const& path() const noexcept {
      return _path;
    }

   private:
    static std::string format(std::string const& msg, std::size_t line, std::size_t column,
                              std::string const& path) {
      if (line > 0) {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": "
               + msg;
      }
      return (path.empty() ? std::string("/") : path) + ": " + msg;
    }

    std::size_t _line;
    std::size_t _column;
    std::string _path;
  };

  struct ProblemFile {
    Field                                  field = Field::real;
    GroupPresentation                      presentation;
    std::size_t                            dim = 0;
    std::vector<Mat<complex_t>>            matrices;  // one per generator
    std::optional<std::vector<Vec<complex_t>>> cocycle;
    std::optional<ToleranceProfile>        tolerances;
    std::optional<SubgroupSpec>            subgroup;
    std::optional<CosetTable>              coset_table;
    std::vector<Word>                      central_words;
    std::optional<std::uint64_t>           seed;
    std::optional<Vec<complex_t>>          origin;

    template <Scalar S>
    Representation<S> representation() const {
      if (scalar_traits<S>::field != field) {
        throw std::invalid_argument("problem file field is " + std::string(to_string(field)));
      }
      std::vector<Mat<S>> gens;
      for (auto const& m : matrices) {
        if constexpr (scalar_traits<S>::is_complex) {
          gens.push_back(m);
        } else {
          gens.push_back(m.real());
        }
      }
      return Representation<S>(presentation, dim, std::move(gens));
    }

    // The cocycle defaults to zero when the file has none.
    template <Scalar S>
    AffineAction<S> action() const {
      Cocycle<S> b = Cocycle<S>::zero(presentation.generator_count(), dim);
      if (cocycle) {
        b.values.clear();
        for (auto const& v : *cocycle) {
          if constexpr (scalar_traits<S>::is_complex) {
            b.values.push_back(v);
          } else {
            b.values.push_back(v.real());
          }
        }
      }
      return AffineAction<S>(representation<S>(), std::move(b));
    }

    template <Scalar S>
    void set_action(AffineAction<S> const& a) {
      field = scalar_traits<S>::field;
      presentation = a.presentation();
      dim = a.dim();
      matrices.clear();
      std::vector<Vec<complex_t>> b;
      for (std::size_t s = 0; s < a.rep().generator_count(); ++s) {
        matrices.push_back(a.linear(s).template cast<complex_t>());
        b.push_back(a.translation(s).template cast<complex_t>());
      }
      cocycle = std::move(b);
    }

    bool operator==(ProblemFile const& o) const;
  };

  namespace detail {
    inline bool same(Mat<complex_t> const& a, Mat<complex_t> const& b) {
      return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
    }
    template <typename T, typename Eq>
    bool same_list(std::vector<T> const& a, std::vector<T> const& b, Eq eq) {
      if (a.size() != b.size()) {
        return false;
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!eq(a[i], b[i])) {
          return false;
        }
      }
      return true;
    }
    inline bool same_vec(Vec<complex_t> const& a, Vec<complex_t> const& b) {
      return a.size() == b.size() && a == b;
    }
  }  // namespace detail

  inline bool ProblemFile::operator==(ProblemFile const& o) const {
    if (field != o.field || !(presentation == o.presentation) || dim != o.dim
        || tolerances != o.tolerances || subgroup != o.subgroup
        || coset_table != o.coset_table || central_words != o.central_words || seed != o.seed
        || cocycle.has_value() != o.cocycle.has_value()
        || origin.has_value() != o.origin.has_value()) {
      return false;
    }
    if (!detail::same_list(matrices, o.matrices, detail::same)) {
      return false;
    }
    if (cocycle && !detail::same_list(*cocycle, *o.cocycle, detail::same_vec)) {
      return false;
    }
    return !origin || detail::same_vec(*origin, *o.origin);
  }

  ////////////////////////////////////////////////////////////////////////
  // Reading
  ////////////////////////////////////////////////////////////////////////

  namespace detail {
    // Cursor into a json value that remembers its path for error messages.
    struct Node {
      json const& v;
      std::string path;

      [[noreturn]] void fail(std::string const& msg) const {
        throw ParseError(msg, 0, 0, path);
      }

      Node at(std::string const& key) const {
        if (!v.is_object()) {
          fail("expected an object");
        }
        auto it = v.find(key);
        if (it == v.end()) {
          fail("missing field '" + key + "'");
        }
        return {*it, path + "/" + key};
      }
      std::optional<Node> opt(std::string const& key) const {
        if (!v.is_object()) {
          fail("expected an object");
        }
        auto it = v.find(key);
        if (it == v.end() || it->is_null()) {
          return std::nullopt;
        }
        return Node{*it, path + "/" + key};
      }
      Node at(std::size_t i) const {
        return {v.at(i), path + "/" + std::to_string(i)};
      }
      std::size_t size() const {
        if (!v.is_array()) {
          fail("expected an array");
        }
        return v.size();
      }
      std::string str() const {
        if (!v.is_string()) {
          fail("expected a string");
        }
        return v.get<std::string>();
      }
      double num() const {
        if (!v.is_number()) {
          fail("expected a number");
        }
        return v.get<double>();
      }
      std::uint64_t uint() const {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
          fail("expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
      }
      std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i) {
          out.push_back(at(i).str());
        }
        return out;
      }
      void check_keys(std::initializer_list<char const*> allowed) const {
        if (!v.is_object()) {
          fail("expected an object");
        }
        for (auto const& [k, _] : v.items()) {
          if (std::find_if(allowed.begin(), allowed.end(),
                           [&](char const* a) { return k == a; })
              == allowed.end()) {
            fail("unknown field '" + k + "'");
          }
        }
      }
    };

    inline void check_names(Node const& n, std::vector<std::string> const& names) {
      for (auto const& [k, _] : n.v.items()) {
        if (std::find(names.begin(), names.end(), k) == names.end()) {
          n.fail("unknown generator '" + k + "'");
        }
      }
    }

    inline complex_t scalar(Node const& n, Field f) {
      if (n.v.is_number()) {
        return {n.num(), 0.0};
      }
      if (f == Field::real) {
        n.fail("expected a real number");
      }
      if (!n.v.is_array() || n.v.size() != 2) {
        n.fail("expected a number or an [re, im] pair");
      }
      return {n.at(std::size_t{0}).num(), n.at(std::size_t{1}).num()};
    }

    inline Vec<complex_t> vector(Node const& n, Field f, std::size_t dim) {
      if (n.size() != dim) {
        n.fail("expected " + std::to_string(dim) + " entries, got "
               + std::to_string(n.size()));
      }
      Vec<complex_t> out(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) {
        out(static_cast<Eigen::Index>(i)) = scalar(n.at(i), f);
      }
      return out;
    }

    inline Mat<complex_t> matrix(Node const& n, Field f, std::size_t dim) {
      if (n.size() != dim * dim) {
        n.fail("expected " + std::to_string(dim * dim) + " entries (row-major " + std::to_string(dim)
               + "x" + std::to_string(dim) + "), got " + std::to_string(n.size()));
      }
      Mat<complex_t> out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
          out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
              = scalar(n.at(i * dim + j), f);
        }
      }
      return out;
    }

    inline Word word(Node const& n, GroupPresentation const& p) {
      try {
        return p.parse_word(n.str());
      } catch (ParseError const&) {
        throw;
      } catch (std::exception const& e) {
        n.fail(e.what());
      }
    }

    inline GroupPresentation presentation(Node const& n) {
      n.check_keys({"generators", "relators"});
      auto names = n.at("generators").strings();
      try {
        GroupPresentation p(names, {});
        std::vector<Word> rels;
        if (auto r = n.opt("relators")) {
          for (std::size_t i = 0; i < r->size(); ++i) {
            rels.push_back(word(r->at(i), p));
          }
        }
        return GroupPresentation(std::move(names), std::move(rels));
      } catch (ParseError const&) {
        throw;
      } catch (std::exception const& e) {
        n.fail(e.what());
      }
    }

    inline CosetTable coset_table(Node const& n, GroupPresentation const& ambient,
                                  GroupPresentation const& sub) {
      n.check_keys({"cosets", "transversal", "action", "schreier"});
      CosetTable ct;
      ct.cosets = n.at("cosets").uint();
      Node tr = n.at("transversal");
      for (std::size_t i = 0; i < tr.size(); ++i) {
        ct.transversal.push_back(word(tr.at(i), ambient));
      }
      Node act = n.at("action");
      Node sch = n.at("schreier");
      for (auto const& name : ambient.generator_names()) {
        Node                     row = act.at(name);
        std::vector<std::size_t> perm;
        for (std::size_t i = 0; i < row.size(); ++i) {
          perm.push_back(row.at(i).uint());
        }
        ct.action.push_back(std::move(perm));
        Node              srow = sch.at(name);
        std::vector<Word> us;
        for (std::size_t i = 0; i < srow.size(); ++i) {
          us.push_back(word(srow.at(i), sub));
        }
        ct.schreier.push_back(std::move(us));
      }
      check_names(act, ambient.generator_names());
      check_names(sch, ambient.generator_names());
      return ct;
    }

    inline json parse_text(std::string_view text) {
      try {
        return json::parse(text.begin(), text.end());
      } catch (json::parse_error const& e) {
        // e.byte is the 1-based offset just past the failure point.
        std::size_t line = 1, col = 1;
        std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
          if (text[i] == '\n') {
            ++line;
            col = 1;
          } else {
            ++col;
          }
        }
        std::string msg = e.what();
        auto        pos = msg.find("syntax error");
        throw ParseError(pos == std::string::npos ? msg : msg.substr(pos), line, col, "");
      }
    }

    inline void check_version(Node const& root) {
      auto v = root.opt("format_version");
      if (!v) {
        root.fail("missing field 'format_version'");
      }
      if (v->str() != "1") {
        v->fail("unsupported format version '" + v->str() + "'");
      }
    }

    inline ToleranceProfile tolerances(Node const& n) {
      n.check_keys({"rank", "residual", "eig"});
      ToleranceProfile tol;
      if (auto r = n.opt("rank")) {
        tol.rank = r->num();
      }
      if (auto r = n.opt("residual")) {
        tol.residual = r->num();
      }
      if (auto r = n.opt("eig")) {
        tol.eig = r->num();
      }
      try {
        tol.validate();
      } catch (std::invalid_argument const& e) {
        n.fail(e.what());
      }
      return tol;
    }
  }  // namespace detail

  inline ProblemFile parse_problem(std::string_view text) {
    json         doc = detail::parse_text(text);
    detail::Node root{doc, ""};
    root.check_keys({"format_version", "field", "presentation", "dim", "matrices", "cocycle",
                     "tolerances", "subgroup", "coset_table", "central_words", "seed", "origin",
                     "comment"});
    detail::check_version(root);
    ProblemFile pf;
    auto        f = root.at("field");
    if (f.str() == "real") {
      pf.field = Field::real;
    } else if (f.str() == "complex") {
      pf.field = Field::complex;
    } else {
      f.fail("field must be \"real\" or \"complex\"");
    }
    pf.presentation = detail::presentation(root.at("presentation"));
    auto d = root.at("dim");
    pf.dim = d.uint();
    if (pf.dim == 0) {
      d.fail("dim must be >= 1");
    }
    auto const& names = pf.presentation.generator_names();

    auto mats = root.at("matrices");
    for (auto const& n : names) {
      pf.matrices.push_back(detail::matrix(mats.at(n), pf.field, pf.dim));
    }
    detail::check_names(mats, names);
    if (auto c = root.opt("cocycle")) {
      std::vector<Vec<complex_t>> b;
      for (auto const& n : names) {
        b.push_back(detail::vector(c->at(n), pf.field, pf.dim));
      }
      detail::check_names(*c, names);
      pf.cocycle = std::move(b);
    }
    if (auto t = root.opt("tolerances")) {
      pf.tolerances = detail::tolerances(*t);
    }
    if (auto s = root.opt("subgroup")) {
      s->check_keys({"words", "generators", "relators"});
      SubgroupSpec sub;
      auto         ws = s->at("words");
      for (std::size_t i = 0; i < ws.size(); ++i) {
        sub.words.push_back(detail::word(ws.at(i), pf.presentation));
      }
      if (s->opt("generators")) {
        json pres = {{"generators", s->v.at("generators")},
                     {"relators", s->v.value("relators", json::array())}};
        sub.presentation = detail::presentation(detail::Node{pres, s->path});
      } else if (s->opt("relators")) {
        s->fail("subgroup relators need subgroup generator names");
      }
      try {
        (void) sub.group();
      } catch (std::exception const& e) {
        s->fail(e.what());
      }
      pf.subgroup = std::move(sub);
    }
    if (auto c = root.opt("coset_table")) {
      if (!pf.subgroup) {
        c->fail("a coset table needs a subgroup");
      }
      pf.coset_table = detail::coset_table(*c, pf.presentation, pf.subgroup->group());
    }
    if (auto c = root.opt("central_words")) {
      for (std::size_t i = 0; i < c->size(); ++i) {
        pf.central_words.push_back(detail::word(c->at(i), pf.presentation));
      }
    }
    if (auto s = root.opt("seed")) {
      pf.seed = s->uint();
    }
    if (auto o = root.opt("origin")) {
      pf.origin = detail::vector(*o, pf.field, pf.dim);
    }
    return pf;
  }

  inline InducedSetup parse_setup(std::string_view text) {
    json         doc = detail::parse_text(text);
    detail::Node root{doc, ""};
    root.check_keys({"format_version", "ambient", "subgroup", "coset_table", "comment"});
    detail::check_version(root);
    InducedSetup s;
    s.ambient = detail::presentation(root.at("ambient"));
    s.subgroup = detail::presentation(root.at("subgroup"));
    s.table = detail::coset_table(root.at("coset_table"), s.ambient, s.subgroup);
    return s;
  }

  inline std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  inline ProblemFile load_problem(std::string const& path) {
    return parse_problem(read_file(path));
  }

  inline InducedSetup load_setup(std::string const& path) {
    return parse_setup(read_file(path));
  }

  ////////////////////////////////////////////////////////////////////////
  // Writing
  ////////////////////////////////////////////////////////////////////////

  namespace detail {
    inline json scalar_json(complex_t z, Field f) {
      if (f == Field::real) {
        return z.real();
      }
      return json::array({z.real(), z.imag()});
    }
  }  // namespace detail

  template <typename Derived>
  json vector_json(Eigen::MatrixBase<Derived> const& v, Field f) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out.push_back(detail::scalar_json(complex_t(v(i)), f));
    }
    return out;
  }

  // Flat row-major.
  template <typename Derived>
  json matrix_json(Eigen::MatrixBase<Derived> const& m, Field f) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.push_back(detail::scalar_json(complex_t(m(i, j)), f));
      }
    }
    return out;
  }

  // Columns as a list of vectors.
  template <typename Derived>
  json columns_json(Eigen::MatrixBase<Derived> const& m, Field f) {
    json out = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(vector_json(m.col(j), f));
    }
    return out;
  }

  inline json presentation_json(GroupPresentation const& p) {
    json rels = json::array();
    for (auto const& r : p.relators()) {
      rels.push_back(p.format_word(r));
    }
    return {{"generators", p.generator_names()}, {"relators", rels}};
  }

  inline json coset_table_json(CosetTable const& ct, GroupPresentation const& ambient,
                               GroupPresentation const& sub) {
    json tr = json::array();
    for (auto const& w : ct.transversal) {
      tr.push_back(ambient.format_word(w));
    }
    json act = json::object(), sch = json::object();
    for (std::size_t s = 0; s < ambient.generator_count(); ++s) {
      auto const& name = ambient.generator_names()[s];
      act[name] = ct.action.at(s);
      json us = json::array();
      for (auto const& u : ct.schreier.at(s)) {
        us.push_back(sub.format_word(u));
      }
      sch[name] = us;
    }
    return {{"cosets", ct.cosets}, {"transversal", tr}, {"action", act}, {"schreier", sch}};
  }

  inline json to_json(ProblemFile const& pf) {
    json        doc;
    auto const& names = pf.presentation.generator_names();
    doc["format_version"] = "1";
    doc["field"] = to_string(pf.field);
    doc["presentation"] = presentation_json(pf.presentation);
    doc["dim"] = pf.dim;
    json mats = json::object();
    for (std::size_t s = 0; s < names.size(); ++s) {
      mats[names[s]] = matrix_json(pf.matrices.at(s), pf.field);
    }
    doc["matrices"] = mats;
    if (pf.cocycle) {
      json b = json::object();
      for (std::size_t s = 0; s < names.size(); ++s) {
        b[names[s]] = vector_json(pf.cocycle->at(s), pf.field);
      }
      doc["cocycle"] = b;
    }
    if (pf.tolerances) {
      doc["tolerances"] = {{"rank", pf.tolerances->rank},
                           {"residual", pf.tolerances->residual},
                           {"eig", pf.tolerances->eig}};
    }
    if (pf.subgroup) {
      json ws = json::array();
      for (auto const& w : pf.subgroup->words) {
        ws.push_back(pf.presentation.format_word(w));
      }
      json sub = {{"words", ws}};
      if (pf.subgroup->presentation) {
        json p = presentation_json(*pf.subgroup->presentation);
        sub["generators"] = p["generators"];
        sub["relators"] = p["relators"];
      }
      doc["subgroup"] = sub;
    }
    if (pf.coset_table) {
      doc["coset_table"]
          = coset_table_json(*pf.coset_table, pf.presentation, pf.subgroup->group());
    }
    if (!pf.central_words.empty()) {
      json cw = json::array();
      for (auto const& w : pf.central_words) {
        cw.push_back(pf.presentation.format_word(w));
      }
      doc["central_words"] = cw;
    }
    if (pf.seed) {
      doc["seed"] = *pf.seed;
    }
    if (pf.origin) {
      doc["origin"] = vector_json(*pf.origin, pf.field);
    }
    return doc;
  }

  inline json to_json(InducedSetup const& s) {
    return {{"format_version", "1"},
            {"ambient", presentation_json(s.ambient)},
            {"subgroup", presentation_json(s.subgroup)},
            {"coset_table", coset_table_json(s.table, s.ambient, s.subgroup)}};
  }

  inline std::string serialize(ProblemFile const& pf) {
    return to_json(pf).dump(2) + "\n";
  }

  inline std::string serialize(InducedSetup const& s) {
    return to_json(s).dump(2) + "\n";
  }

}  // namespace affirr::io

#endif  // AFFIRR_IO_HPP_

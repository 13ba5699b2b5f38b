#include "cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "freeprob/bialgebra.hpp"
#include "freeprob/dual.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/io.hpp"
#include "freeprob/models.hpp"
#include "report.hpp"

namespace freeprob::cli {

void Report::add(std::string_view key, std::string_view value) {
  text_ += key;
  if (!value.empty()) {
    text_ += ' ';
    text_ += value;
  }
  text_ += '\n';
}

void Report::violation(const Word& w, std::string_view expected, std::string_view got) {
  add("VIOLATION", w.to_string() + " expected " + std::string(expected) + " got " + std::string(got));
}

namespace {

constexpr int kDefaultDegree = 4;

struct Config {
  int n = 2;
  std::optional<int> degree;
  std::uint64_t seed = 0;
  int trials = 10;
  bool tracial = false;
  std::string reps = "pi,unitary";
  std::string out;
};

std::string load_text(const std::string& path) { return read_file(path); }

MomentFunctional load_distribution(const std::string& path) {
  try {
    return parse_distribution(load_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

CumulantTable load_cumulants(const std::string& path, bool& tracial) {
  try {
    TableFile f = parse_table(load_text(path));
    if (f.kind != TableKind::cumulants) throw ParseError("expected table=cumulants");
    tracial = f.tracial;
    return CumulantTable(std::move(f.table));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// --degree when given (must not exceed the table), else min(default, table)
int pick_degree(const Config& cfg, int table_degree) {
  if (cfg.degree) {
    if (*cfg.degree < 1) throw DomainError("--degree must be positive");
    if (*cfg.degree > table_degree)
      throw CapError("--degree " + std::to_string(*cfg.degree) + " exceeds the file's degree " +
                     std::to_string(table_degree));
    return *cfg.degree;
  }
  return std::min(kDefaultDegree, table_degree);
}

int generate_degree(const Config& cfg) {
  const int d = cfg.degree.value_or(kDefaultDegree);
  if (d < 1) throw DomainError("--degree must be positive");
  return d;
}

RepSelection parse_reps(const Config& cfg) {
  RepSelection reps;
  reps.pi = false;
  reps.trials = 0;
  reps.seed = cfg.seed;
  std::stringstream in(cfg.reps);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "pi")
      reps.pi = true;
    else if (item == "unitary")
      reps.trials = cfg.trials;
    else
      throw DomainError("unknown representation '" + item + "' (expected pi or unitary)");
  }
  if (cfg.trials < 0) throw DomainError("--trials must be non-negative");
  if (!reps.pi && reps.trials == 0) throw DomainError("no representation selected");
  return reps;
}

std::string reps_label(const RepSelection& reps, int n) {
  std::string s;
  if (reps.pi) s = "pi_" + std::to_string(n);
  if (reps.trials > 0) {
    if (!s.empty()) s += ",";
    s += "unitary x" + std::to_string(reps.trials);
  }
  return s;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParseError("bad integer '" + item + "' in list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

void emit(const Config& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty())
    out << text;
  else
    write_file(cfg.out, text);
}

void add_report_line(Report& r, const InvarianceReport& inv) {
  r.verdict(inv.pass);
  if (inv.violation) {
    r.violation(inv.violation->word, inv.violation->expected, inv.violation->got);
    if (!inv.violation->witness.empty()) r.add("WITNESS", inv.violation->witness);
  }
}

MomentFunctional build_constant(const Rational& c, int degree, const std::string& alphabet) {
  WordTable t(LetterSet::family(alphabet, 1), degree);
  Rational power = 1;
  for (int m = 0; m <= degree; ++m, power *= c)
    for (std::uint64_t code = 0; code < t.count(m); ++code) t.at(m, code) = power;
  return MomentFunctional(std::move(t), true);
}

void add_n(CLI::App* app, Config& cfg) { app->add_option("--n", cfg.n, "matrix size / number of letters acted on"); }
void add_degree(CLI::App* app, Config& cfg) { app->add_option("--degree", cfg.degree, "degree cap D"); }
void add_out(CLI::App* app, Config& cfg) { app->add_option("--out", cfg.out, "write output here instead of stdout"); }
void add_reps(CLI::App* app, Config& cfg) {
  app->add_option("--reps", cfg.reps, "comma list of pi, unitary")->capture_default_str();
  app->add_option("--trials", cfg.trials, "number of seeded unitaries")->capture_default_str();
  app->add_option("--seed", cfg.seed, "seed for unitary sampling")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact free-probability and quantum-invariance checks", "freeprob"};
  app.require_subcommand(1);
  Config cfg;
  std::string input, letter, left_alphabets, word_text, value_text = "1", poly_text, compare, j_text, pattern_text,
                                                 pi_text, variance_text = "1", theta_text = "1", left_file, right_file,
                                                 alphabet = "x";
  int count = 2, rmax = 3, k = 3;
  bool beta = false;

  auto* cumulants = app.add_subcommand("cumulants", "moment file -> cumulant table");
  cumulants->add_option("file", input, "distribution file")->required();
  cumulants->add_option("--degree", cfg.degree, "truncate to this degree");
  add_out(cumulants, cfg);

  auto* moments = app.add_subcommand("moments", "cumulant table -> moment file");
  moments->add_option("file", input, "cumulant table")->required();
  moments->add_flag("--tracial", cfg.tracial, "mark the result tracial (validated)");
  add_out(moments, cfg);

  auto* check = app.add_subcommand("check", "run an invariance or structure check");
  check->require_subcommand(1);
  auto* dual = check->add_subcommand("dual", "dual group action invariance");
  dual->add_option("file", input)->required();
  dual->add_flag("--beta", beta, "act on the first n letters and fix the rest");
  add_n(dual, cfg);
  add_degree(dual, cfg);
  add_out(dual, cfg);
  auto* pattern = check->add_subcommand("pattern", "cyclic cumulant pattern (alpha, beta sequences)");
  pattern->add_option("file", input)->required();
  add_degree(pattern, cfg);
  add_out(pattern, cfg);
  auto* rdiag = check->add_subcommand("rdiag", "R-diagonality of one letter");
  rdiag->add_option("file", input)->required();
  rdiag->add_option("--letter", letter, "letter to test, e.g. x1")->required();
  add_degree(rdiag, cfg);
  add_out(rdiag, cfg);
  auto* bialg = check->add_subcommand("bialg", "bialgebraic action invariance");
  bialg->add_option("file", input)->required();
  add_n(bialg, cfg);
  add_degree(bialg, cfg);
  add_reps(bialg, cfg);
  add_out(bialg, cfg);
  auto* freeness = check->add_subcommand("freeness", "mixed cumulants vanish between two groups of letters");
  freeness->add_option("file", input)->required();
  freeness->add_option("--left", left_alphabets, "comma list of alphabets on the left side")->required();
  add_degree(freeness, cfg);
  add_out(freeness, cfg);
  auto* fixedpoint = check->add_subcommand("fixedpoint", "polynomial fixed by the dual action");
  fixedpoint->add_option("--poly", poly_text, "polynomial in the t letters")->required();
  add_n(fixedpoint, cfg);
  fixedpoint->add_option("--trials", cfg.trials)->capture_default_str();
  fixedpoint->add_option("--seed", cfg.seed)->capture_default_str();
  add_out(fixedpoint, cfg);
  auto* lemma = check->add_subcommand("lemma63", "interval-sum lemma: symbolic vs representations");
  add_n(lemma, cfg);
  lemma->add_option("--k", k, "sweep pairings of 2, 4, ..., 2k points")->capture_default_str();
  lemma->add_option("--j", j_text, "single case: comma list of row indices");
  lemma->add_option("--pattern", pattern_text, "single case: star pattern, e.g. .*");
  lemma->add_option("--pi", pi_text, "single case: pairing, e.g. {{1,2}}");
  add_reps(lemma, cfg);
  add_out(lemma, cfg);

  auto* generate = app.add_subcommand("generate", "write a model distribution");
  generate->require_subcommand(1);
  auto* g_circ = generate->add_subcommand("circular", "free circular family");
  g_circ->add_option("--count", count)->capture_default_str();
  g_circ->add_option("--variance", variance_text)->capture_default_str();
  auto* g_semi = generate->add_subcommand("semicircular", "free semicircular family");
  g_semi->add_option("--count", count)->capture_default_str();
  auto* g_haar = generate->add_subcommand("haar-unitary", "free Haar unitaries");
  g_haar->add_option("--count", count)->capture_default_str();
  auto* g_unif = generate->add_subcommand("freely-uniform", "one column of the Brown generator matrix");
  add_n(g_unif, cfg);
  auto* g_prod = generate->add_subcommand("product", "y_i = u_i s with u and s free");
  add_n(g_prod, cfg);
  g_prod->add_option("--left", left_file, "family u (default freely uniform on --n letters)");
  g_prod->add_option("--right", right_file, "single self-adjoint s (default symmetric Bernoulli)");
  auto* g_eta = generate->add_subcommand("eta0", "circular family with one vanishing variance");
  g_eta->add_option("--count", count)->capture_default_str();
  g_eta->add_option("--theta", theta_text, "variance of x x*")->capture_default_str();
  auto* g_const = generate->add_subcommand("constant", "the scalar c·1 as one letter: every word of length k gets c^k");
  g_const->add_option("--value", value_text)->capture_default_str();
  for (auto* g : {g_circ, g_semi, g_haar, g_unif, g_prod, g_eta, g_const}) {
    add_degree(g, cfg);
    add_out(g, cfg);
    g->add_option("--alphabet", alphabet)->capture_default_str();
  }

  auto* perturb = app.add_subcommand("perturb", "replace one cumulant (and its adjoint) and regenerate");
  perturb->add_option("file", input)->required();
  perturb->add_option("--word", word_text)->required();
  perturb->add_option("--value", value_text)->required();
  add_out(perturb, cfg);

  auto* recover = app.add_subcommand("recover-alpha", "alpha sequence from the moments of s = sum x_i* x_i");
  recover->add_option("file", input, "single-letter moment file for s")->required();
  add_n(recover, cfg);
  recover->add_option("--rmax", rmax)->capture_default_str();
  recover->add_option("--compare", compare, "x distribution whose direct cumulant pattern is compared");
  add_out(recover, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cumulants->parsed()) {
      MomentFunctional phi = load_distribution(input);
      if (cfg.degree) phi = truncate(phi, *cfg.degree);
      emit(cfg, format_cumulants(cumulants_from_moments(phi), phi.tracial()), out);
      return 0;
    }
    if (moments->parsed()) {
      bool tracial = false;
      const CumulantTable kappa = load_cumulants(input, tracial);
      emit(cfg, format_distribution(moments_from_cumulants(kappa, tracial || cfg.tracial)), out);
      return 0;
    }
    if (generate->parsed()) {
      const int d = generate_degree(cfg);
      std::optional<MomentFunctional> phi;
      if (g_circ->parsed())
        phi = build_circular_family(count, parse_rational(variance_text), d, alphabet);
      else if (g_semi->parsed())
        phi = build_semicircular_family(count, d, alphabet);
      else if (g_haar->parsed())
        phi = build_haar_unitary_family(count, d, alphabet);
      else if (g_unif->parsed())
        phi = build_freely_uniform(cfg.n, d, alphabet);
      else if (g_const->parsed())
        phi = build_constant(parse_rational(value_text), d, alphabet);
      else if (g_eta->parsed())
        phi = build_eta_zero_circular(count, parse_rational(theta_text), d, alphabet);
      else {
        const MomentFunctional u = left_file.empty() ? build_freely_uniform(cfg.n, d) : load_distribution(left_file);
        const MomentFunctional s = right_file.empty() ? build_bernoulli(d) : load_distribution(right_file);
        phi = rename_alphabet(build_product_family(u, s, d), alphabet);
      }
      emit(cfg, format_distribution(*phi), out);
      return 0;
    }
    if (perturb->parsed()) {
      const MomentFunctional phi = load_distribution(input);
      emit(cfg, format_distribution(perturb_cumulant(phi, Word::parse(word_text), parse_rational(value_text))), out);
      return 0;
    }
    if (recover->parsed()) {
      const MomentFunctional s = load_distribution(input);
      if (s.letters().size() != 1) throw DomainError("the s file must declare exactly one letter");
      if (rmax < 1) throw DomainError("--rmax must be positive");
      if (s.degree() < rmax) throw CapError("the s file's degree is below --rmax");
      std::vector<Rational> powers;
      Word w;
      for (int p = 0; p <= rmax; ++p) {
        powers.push_back(s(w));
        w.push_back(s.letters().letters()[0]);
      }
      const RecoveredAlpha rec = recover_alpha_sequence(powers, cfg.n, rmax);
      std::string text;
      for (int r = 0; r < rmax; ++r)
        text += "alpha" + std::to_string(r + 1) + " = " + to_string(rec.alpha[static_cast<std::size_t>(r)]) + "\n";
      bool agree = true;
      if (!compare.empty()) {
        const MomentFunctional x = load_distribution(compare);
        const PatternReport direct = check_cumulant_pattern(x, std::min(x.degree(), 2 * rmax));
        if (!direct.pass) throw DomainError("--compare file has no cyclic cumulant pattern");
        for (int r = 0; r < rmax; ++r) {
          const auto idx = static_cast<std::size_t>(r);
          const std::string name = "alpha" + std::to_string(r + 1);
          if (idx >= direct.spec.alpha.size()) {
            text += "UNCHECKED " + name + " beyond the compared file's degree\n";
          } else if (direct.spec.alpha[idx] == rec.alpha[idx]) {
            text += "MATCH " + name + "\n";
          } else {
            agree = false;
            text += "MISMATCH " + name + " recovered " + to_string(rec.alpha[idx]) + " direct " +
                    to_string(direct.spec.alpha[idx]) + "\n";
          }
        }
      }
      emit(cfg, text, out);
      return agree ? 0 : 1;
    }

    // checks
    if (fixedpoint->parsed()) {
      const BrownContext ctx(cfg.n);
      const NCPolynomial p = NCPolynomial::parse(poly_text);
      const FixedPointReport fp = fixed_point_check(ctx, p, cfg.trials, cfg.seed);
      Report r("fixedpoint");
      r.add("N", cfg.n);
      r.add("POLY", p.to_string());
      r.add("REWRITE", fp.rewrite_fixed ? "fixed" : "moved");
      if (!fp.rewrite_fixed) r.add("RESIDUAL", fp.residual.to_string());
      r.add("REPRESENTATION", fp.rep_fixed ? "fixed" : "moved");
      r.verdict(fp.fixed());
      if (fp.rep.distinguished) {
        r.add("WITNESS", fp.rep.witness);
        r.add("DETAIL", fp.rep.detail);
      }
      emit(cfg, r.str(), out);
      return fp.fixed() ? 0 : 1;
    }
    if (lemma->parsed()) {
      const RepSelection reps = parse_reps(cfg);
      Report r("lemma63");
      r.add("N", cfg.n);
      r.add("REPS", reps_label(reps, cfg.n));
      r.add("SEED", std::to_string(cfg.seed));
      bool pass = true;
      if (!j_text.empty() || !pattern_text.empty() || !pi_text.empty()) {
        if (j_text.empty() || pattern_text.empty() || pi_text.empty())
          throw DomainError("a single case needs --j, --pattern and --pi together");
        const std::vector<int> j = parse_int_list(j_text);
        const StarPattern e = StarPattern::parse(pattern_text);
        const NCPartition pi = NCPartition::parse(pi_text);
        const LemmaVerdict sym = check_interval_sum_lemma(cfg.n, j, e, pi, LemmaMode::symbolic, reps);
        const LemmaVerdict rep = check_interval_sum_lemma(cfg.n, j, e, pi, LemmaMode::reps, reps);
        pass = sym.agree && rep.agree && sym.value == rep.value;
        r.add("J", j_text);
        r.add("PATTERN", e.to_string());
        r.add("PI", pi.to_string());
        r.add("PREDICTED", to_string(sym.predicted));
        r.add("SYMBOLIC", to_string(sym.value));
        r.add("REPRESENTATIONS", rep.agree ? "agree" : "disagree");
        r.verdict(pass);
        if (!sym.detail.empty()) r.add("DETAIL", sym.detail);
        if (!rep.detail.empty()) r.add("DETAIL", rep.detail);
      } else {
        if (k < 1) throw DomainError("--k must be positive");
        std::uint64_t cases = 0, bad = 0;
        std::string first;
        for (int kk = 1; kk <= k; ++kk) {
          const LemmaSweep s = sweep_interval_sum_lemma(cfg.n, kk, reps);
          cases += s.cases;
          if (bad == 0 && s.disagreements > 0) first = s.first_disagreement;
          bad += s.disagreements;
        }
        pass = bad == 0;
        r.add("K", k);
        r.add("CASES", std::to_string(cases));
        r.add("DISAGREEMENTS", std::to_string(bad));
        r.verdict(pass);
        if (!pass) r.add("FIRST", first);
      }
      emit(cfg, r.str(), out);
      return pass ? 0 : 1;
    }

    const MomentFunctional phi = load_distribution(input);
    const int d = pick_degree(cfg, phi.degree());
    Report r(dual->parsed()       ? "dual"
             : pattern->parsed()  ? "pattern"
             : rdiag->parsed()    ? "rdiag"
             : bialg->parsed()    ? "bialg"
                                  : "freeness");
    bool pass = true;
    if (dual->parsed()) {
      const InvarianceReport inv =
          check_dual_invariance(phi, cfg.n, d, beta ? ActionMode::beta : ActionMode::alpha);
      r.add("N", cfg.n);
      r.add("DEGREE", d);
      r.add("MODE", beta ? "beta" : "alpha");
      add_report_line(r, inv);
      pass = inv.pass;
    } else if (pattern->parsed()) {
      const PatternReport pr = check_cumulant_pattern(phi, d);
      r.add("DEGREE", d);
      r.verdict(pr.pass);
      if (pr.pass) {
        for (std::size_t i = 0; i < pr.spec.alpha.size(); ++i)
          r.add("ALPHA", std::to_string(i + 1) + " " + to_string(pr.spec.alpha[i]));
        for (std::size_t i = 0; i < pr.spec.beta.size(); ++i)
          r.add("BETA", std::to_string(i + 1) + " " + to_string(pr.spec.beta[i]));
      } else {
        r.add("VIOLATION", pr.violation->to_string() + " cumulant " + to_string(pr.value));
        r.add("REASON", pr.reason);
      }
      pass = pr.pass;
    } else if (rdiag->parsed()) {
      const RDiagonalReport rd = check_rdiagonal(phi, Letter::parse(letter), d);
      r.add("LETTER", letter);
      r.add("DEGREE", d);
      r.verdict(rd.pass);
      if (!rd.pass) r.violation(*rd.violation, "0", to_string(rd.value));
      pass = rd.pass;
    } else if (bialg->parsed()) {
      const RepSelection reps = parse_reps(cfg);
      const InvarianceReport inv = check_bialgebra_invariance(phi, cfg.n, d, reps);
      r.add("N", cfg.n);
      r.add("DEGREE", d);
      r.add("REPS", reps_label(reps, cfg.n));
      r.add("SEED", std::to_string(cfg.seed));
      add_report_line(r, inv);
      pass = inv.pass;
    } else {
      std::set<std::string> names;
      std::stringstream in(left_alphabets);
      std::string item;
      while (std::getline(in, item, ',')) names.insert(item);
      std::vector<Letter> left;
      for (const auto& l : phi.letters().letters())
        if (names.count(l.alphabet)) left.push_back(l);
      if (left.empty()) throw DomainError("--left names no declared alphabet");
      const FreenessReport fr = check_freeness(truncate(phi, d), LetterSet(left));
      r.add("LEFT", left_alphabets);
      r.add("DEGREE", d);
      r.verdict(fr.free);
      if (!fr.free) r.violation(*fr.violation, "0", to_string(fr.value));
      pass = fr.free;
    }
    emit(cfg, r.str(), out);
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace freeprob::cli

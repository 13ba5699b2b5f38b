#include "freeprob/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_count(std::string_view s, int line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0)
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", line);
  return v;
}

struct AlphabetDecl {
  std::string name;
  int arity = 1;
  int count = -1;  // -1: take nvars
  int line = 0;
};

}  // namespace

TableFile parse_table(std::string_view text) {
  std::vector<AlphabetDecl> alphabets;
  int nvars = -1;
  int degree = -1;
  TableFile out;
  bool in_body = false;
  bool seen_unit = false;
  std::vector<std::pair<int, std::string>> body;  // deferred until headers are complete

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (line.find('=') != std::string_view::npos && line.find(" = ") != std::string_view::npos) {
      in_body = true;
      body.emplace_back(line_no, std::string(line));
    } else if (line.rfind("alphabet", 0) == 0) {
      if (in_body) throw ParseError("header after body lines", line_no);
      std::istringstream in{std::string(line)};
      std::string kw, name, arity, count;
      in >> kw >> name >> arity >> count;
      std::string extra;
      if (kw != "alphabet" || name.empty() || arity.empty() || (in >> extra))
        throw ParseError("expected 'alphabet <name> <arity> [count]'", line_no);
      AlphabetDecl d;
      d.name = name;
      d.line = line_no;
      for (char c : name)
        if (!std::isalpha(static_cast<unsigned char>(c))) throw ParseError("bad alphabet name '" + name + "'", line_no);
      d.arity = parse_count(arity, line_no, "arity");
      if (d.arity != 1 && d.arity != 2) throw ParseError("arity must be 1 or 2", line_no);
      if (!count.empty()) d.count = parse_count(count, line_no, "letter count");
      alphabets.push_back(d);
    } else if (line.rfind("nvars=", 0) == 0) {
      if (in_body) throw ParseError("header after body lines", line_no);
      nvars = parse_count(trim(line.substr(6)), line_no, "nvars");
    } else if (line.rfind("degree=", 0) == 0) {
      if (in_body) throw ParseError("header after body lines", line_no);
      degree = parse_count(trim(line.substr(7)), line_no, "degree");
    } else if (line.rfind("tracial=", 0) == 0) {
      if (in_body) throw ParseError("header after body lines", line_no);
      const auto v = trim(line.substr(8));
      if (v != "true" && v != "false") throw ParseError("tracial must be true or false", line_no);
      out.tracial = v == "true";
    } else if (line.rfind("table=", 0) == 0) {
      if (in_body) throw ParseError("header after body lines", line_no);
      const auto v = trim(line.substr(6));
      if (v == "moments")
        out.kind = TableKind::moments;
      else if (v == "cumulants")
        out.kind = TableKind::cumulants;
      else
        throw ParseError("table must be moments or cumulants", line_no);
    } else {
      throw ParseError("unrecognized line '" + std::string(line) + "'", line_no);
    }
    if (end == text.size()) break;
  }

  if (alphabets.empty()) throw ParseError("missing 'alphabet' header");
  if (degree < 0) throw ParseError("missing 'degree=' header");
  std::vector<Letter> letters;
  int total = 0;
  for (auto& d : alphabets) {
    if (d.count < 0) {
      if (alphabets.size() != 1 || nvars < 0) throw ParseError("letter count missing for alphabet " + d.name, d.line);
      d.count = d.arity == 1 ? nvars : -1;
      if (d.arity == 2) {
        int n = 0;
        while (n * n < nvars) ++n;
        if (n * n != nvars) throw ParseError("nvars is not a square for arity-2 alphabet " + d.name, d.line);
        d.count = n;
      }
    }
    if (d.count < 1) throw ParseError("alphabet " + d.name + " has no letters", d.line);
    const LetterSet set = d.arity == 1 ? LetterSet::family(d.name, d.count) : LetterSet::matrix(d.name, d.count);
    letters.insert(letters.end(), set.letters().begin(), set.letters().end());
    total += static_cast<int>(set.size());
  }
  if (nvars >= 0 && nvars != total)
    throw ParseError("nvars=" + std::to_string(nvars) + " but the alphabets declare " + std::to_string(total));
  LetterSet set;
  try {
    set = LetterSet(letters);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  if (static_cast<int>(set.size()) != total) throw ParseError("an alphabet is declared twice");
  out.table = WordTable(set, degree);

  std::map<std::pair<int, std::uint64_t>, int> seen;
  for (const auto& [ln, content] : body) {
    const std::size_t eq = content.rfind(" = ");
    const std::string_view lhs = trim(std::string_view(content).substr(0, eq));
    const std::string_view rhs = trim(std::string_view(content).substr(eq + 3));
    Word w;
    Rational v;
    try {
      w = Word::parse(lhs);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), ln);
    }
    try {
      v = parse_rational(rhs);
    } catch (const Error& e) {
      throw ParseError("bad value '" + std::string(rhs) + "'", ln);
    }
    if (static_cast<int>(w.size()) > degree)
      throw ParseError("word '" + w.to_string() + "' is longer than degree " + std::to_string(degree), ln);
    const auto symbols = out.table.symbols_of(w);
    if (!symbols) throw ParseError("word '" + w.to_string() + "' uses an undeclared letter", ln);
    const auto key = std::make_pair(static_cast<int>(w.size()), out.table.encode(*symbols));
    if (seen.count(key)) throw ParseError("duplicate entry for '" + w.to_string() + "'", ln);
    seen[key] = ln;
    if (w.empty()) {
      if (v != 1) throw ParseError("the empty word must have value 1", ln);
      seen_unit = true;
    }
    out.table.at(key.first, key.second) = v;
  }
  if (!seen_unit) throw ParseError("missing mandatory line '1 = 1'");
  return out;
}

MomentFunctional parse_distribution(std::string_view text) {
  TableFile f = parse_table(text);
  if (f.kind != TableKind::moments) throw ParseError("expected a moment table, got table=cumulants");
  return MomentFunctional(std::move(f.table), f.tracial);
}

CumulantTable parse_cumulants(std::string_view text) {
  TableFile f = parse_table(text);
  if (f.kind != TableKind::cumulants) throw ParseError("expected table=cumulants");
  return CumulantTable(std::move(f.table));
}

std::string format_table(const WordTable& table, TableKind kind, bool tracial) {
  std::ostringstream out;
  // group letters by alphabet; families must be contiguous 1..count
  const auto& letters = table.letters().letters();
  const bool single = table.letters().alphabets().size() == 1;
  std::size_t i = 0;
  while (i < letters.size()) {
    const Letter& first = letters[i];
    std::size_t j = i;
    while (j < letters.size() && letters[j].alphabet == first.alphabet) ++j;
    const int size = static_cast<int>(j - i);
    int count = size;
    LetterSet expect;
    if (first.arity == 1) {
      expect = LetterSet::family(first.alphabet, count);
    } else {
      count = 0;
      while (count * count < size) ++count;
      expect = LetterSet::matrix(first.alphabet, count);
    }
    if (!std::equal(expect.letters().begin(), expect.letters().end(), letters.begin() + static_cast<std::ptrdiff_t>(i),
                    letters.begin() + static_cast<std::ptrdiff_t>(j)) ||
        static_cast<int>(expect.size()) != size)
      throw DomainError("alphabet " + first.alphabet + " is not a full family and cannot be written");
    out << "alphabet " << first.alphabet << ' ' << int(first.arity);
    if (!single) out << ' ' << count;  // a lone alphabet takes its size from nvars
    out << '\n';
    i = j;
  }
  out << "nvars=" << letters.size() << '\n';
  out << "degree=" << table.degree() << '\n';
  if (tracial) out << "tracial=true\n";
  if (kind == TableKind::cumulants) out << "table=cumulants\n";
  out << "1 = 1\n";
  for_each_word(table, [&](int m, std::uint64_t code, const std::vector<int>&) {
    const Rational& v = table.at(m, code);
    if (v != 0) out << table.word(m, code).to_string() << " = " << to_string(v) << '\n';
  });
  return out.str();
}

std::string format_distribution(const MomentFunctional& phi) {
  return format_table(phi.table(), TableKind::moments, phi.tracial());
}

std::string format_cumulants(const CumulantTable& kappa, bool tracial) {
  return format_table(kappa.table(), TableKind::cumulants, tracial);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

MomentFunctional truncate(const MomentFunctional& phi, int degree) {
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the table's degree");
  if (degree < 0) throw DomainError("negative degree");
  WordTable t(phi.letters(), degree);
  for (int m = 0; m <= degree; ++m)
    for (std::uint64_t c = 0; c < t.count(m); ++c) t.at(m, c) = phi.table().at(m, c);
  return MomentFunctional(std::move(t), phi.tracial());
}

}  // namespace freeprob

#include "anonplan/lp_format.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"

namespace anonplan {

namespace {

constexpr std::size_t kTermsPerLine = 8;
constexpr const char* kConstantTag = "\\ objective constant: ";

void write_terms(std::ostream& os, std::span<const LpTerm> terms, const LinearProgramModel& lp) {
  if (terms.empty()) {
    os << " 0 " << (lp.num_variables() ? lp.variable(0).name : std::string("x"));
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i && i % kTermsPerLine == 0) os << "\n   ";
    const double c = terms[i].coef;
    os << (c < 0 ? " - " : (i ? " + " : " "));
    if (std::abs(c) != 1.0) os << format_double(std::abs(c)) << ' ';
    os << lp.variable(terms[i].var).name;
  }
}

}  // namespace

void write_lp(std::ostream& os, const LinearProgramModel& lp, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "\\ " << c << '\n';
  if (lp.objective().constant != 0.0) os << kConstantTag << format_double(lp.objective().constant) << '\n';
  os << "Minimize\n obj:";
  write_terms(os, lp.objective().terms, lp);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
    const RowView row = lp.row(r);
    os << " c" << r << ':';
    write_terms(os, row.terms, lp);
    os << " >= " << format_double(row.bound) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : lp.variables()) os << " " << v.name << " free\n";
  os << "End\n";
}

void export_lp(const LinearProgramModel& lp, const std::filesystem::path& path, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_lp(out, lp, comments);
  if (!out) throw Error("failed writing " + path.string());
}

std::string lp_to_string(const LinearProgramModel& lp, const std::vector<std::string>& comments) {
  std::ostringstream os;
  write_lp(os, lp, comments);
  return os.str();
}

namespace {

enum class Section { none, objective, constraints, bounds, end };

struct Parser {
  LinearProgramModel lp;
  std::map<std::string, LpVar> ids;
  LinearExpr objective;

  LpVar var(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    const LpVarKind kind = name.rfind("w_", 0) == 0 ? LpVarKind::weight : LpVarKind::auxiliary;
    const LpVar id = lp.add_variable(name, kind);
    ids.emplace(name, id);
    return id;
  }

  // Parses "[+|-] [coef] name ..." up to an optional ">= rhs".
  void parse_expression(const std::vector<std::string>& tokens, std::size_t from, std::vector<LpTerm>& terms,
                        double* rhs) {
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (std::size_t i = from; i < tokens.size(); ++i) {
      const std::string& t = tokens[i];
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else if (t == ">=") {
        if (!rhs || i + 1 >= tokens.size()) throw Error("malformed LP row");
        *rhs = parse_double(tokens[i + 1]);
        return;
      } else if (!have_coef && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.')) {
        coef = parse_double(t);
        have_coef = true;
      } else {
        terms.push_back({var(t), sign * coef});
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
      }
    }
    if (rhs) throw Error("LP row without '>='");
  }
};

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

LinearProgramModel read_lp(std::istream& is) {
  std::vector<std::pair<Section, std::string>> statements;
  Section section = Section::none;
  double constant = 0.0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kConstantTag, 0) == 0) {
      constant = parse_double(line.substr(std::string(kConstantTag).size()));
      continue;
    }
    if (line.empty() || line[0] == '\\') continue;
    if (line[0] != ' ') {
      const std::string head = tokenize(line).at(0);
      if (head == "Minimize") section = Section::objective;
      else if (head == "Subject") section = Section::constraints;
      else if (head == "Bounds") section = Section::bounds;
      else if (head == "End") section = Section::end;
      else throw Error("unexpected LP line: " + line);
      continue;
    }
    if (section == Section::none || section == Section::end) throw Error("LP content outside a section");
    const bool continuation = section != Section::bounds && line.find(':') == std::string::npos &&
                              !statements.empty() && statements.back().first == section;
    if (continuation)
      statements.back().second += ' ' + line;
    else
      statements.emplace_back(section, line);
  }
  if (section != Section::end) throw Error("LP file missing End");

  Parser p;
  for (const auto& [sec, text] : statements) {
    if (sec != Section::bounds) continue;
    const auto tokens = tokenize(text);
    if (tokens.size() != 2 || tokens[1] != "free") throw Error("unsupported LP bound: " + text);
    p.var(tokens[0]);
  }
  p.objective.constant = constant;
  for (const auto& [sec, text] : statements) {
    if (sec == Section::bounds) continue;
    const auto tokens = tokenize(text);
    const std::size_t from = !tokens.empty() && tokens[0].back() == ':' ? 1 : 0;
    if (sec == Section::objective) {
      p.parse_expression(tokens, from, p.objective.terms, nullptr);
    } else {
      std::vector<LpTerm> terms;
      double rhs = 0.0;
      p.parse_expression(tokens, from, terms, &rhs);
      normalize_terms(terms);
      p.lp.add_row(std::move(terms), rhs);
    }
  }
  p.lp.set_objective(p.objective);
  return std::move(p.lp);
}

LinearProgramModel import_lp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_lp(in);
}

}  // namespace anonplan

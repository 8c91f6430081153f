// Graded elements: a grade plus a body expression in the variables x_a_i, u_i.
// Includes the on-disk element-library format (one expression per line behind a
// header declaring the grade and variable context; '#' starts a comment).
#ifndef ELLQ_ELEMENT_HPP
#define ELLQ_ELEMENT_HPP

#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ellq/expr.hpp"
#include "ellq/parse.hpp"
#include "ellq/roots.hpp"

namespace ellq {

inline std::string x_name(int alpha, int color) {
    return "x_" + std::to_string(alpha) + "_" + std::to_string(color);
}
inline std::string u_name(int color) { return "u_" + std::to_string(color); }
inline std::string y_name(int alpha, int color, const char* prefix = "y") {
    return std::string(prefix) + "_" + std::to_string(alpha) + "_" + std::to_string(color);
}

struct GradedElement {
    Grade grade;
    Expr body;
};

// Variables of F_l: x_{alpha,i} for alpha = 1..l_i plus u_1..u_h.
inline std::vector<std::string> element_variables(const Grade& l, int rank) {
    std::vector<std::string> v;
    for (int i = 1; i <= l.rank(); ++i)
        for (int a = 1; a <= l.counts[i - 1]; ++a) v.push_back(x_name(a, i));
    for (int i = 1; i <= rank; ++i) v.push_back(u_name(i));
    return v;
}

inline GradedElement scale(const GradedElement& e, cplx c) {
    return {e.grade, make_mul(make_const(c), e.body)};
}
inline GradedElement add(const GradedElement& a, const GradedElement& b) {
    if (!(a.grade == b.grade))
        throw invalid_parameter_error("add: grade mismatch");
    return {a.grade, make_add(a.body, b.body)};
}

// ---- element-library files ----------------------------------------------

inline void save_elements(std::ostream& os, const std::vector<GradedElement>& els, int rank) {
    for (const auto& e : els) {
        os << "grade";
        for (int c : e.grade.counts) os << ' ' << c;
        os << " ; vars";
        for (const auto& v : element_variables(e.grade, rank)) os << ' ' << v;
        os << '\n' << print(e.body) << '\n';
    }
}

inline std::vector<GradedElement> load_elements(std::istream& is, int rank) {
    std::vector<GradedElement> out;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    Grade grade;
    std::set<std::string> declared;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "grade") {
            std::vector<int> counts;
            std::string tok;
            while (ls >> tok && tok != ";") counts.push_back(std::stoi(tok));
            if (static_cast<int>(counts.size()) != rank)
                throw parse_error("element header: grade length does not match the rank", lineno, 1);
            std::string kw;
            ls >> kw;
            if (kw != "vars")
                throw parse_error("element header: expected 'vars'", lineno, 1);
            declared.clear();
            while (ls >> tok) declared.insert(tok);
            grade = Grade(counts);
            have_header = true;
        } else {
            if (!have_header)
                throw parse_error("element line before any grade header", lineno, 1);
            Expr body = parse(line);
            validate_context(body, declared);
            out.push_back({grade, body});
        }
    }
    return out;
}

} // namespace ellq

#endif

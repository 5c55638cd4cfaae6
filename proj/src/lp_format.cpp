#include <ostream>
#include <string>

#include "depsel/errors.hpp"
#include "depsel/selection_models.hpp"
#include "text.hpp"

namespace depsel {

namespace {

constexpr std::size_t max_line = 500;

// Accumulates space-separated tokens and wraps before the LP line limit.
class LineWriter {
public:
    explicit LineWriter(std::ostream& out) : out_(out) {}

    void begin(std::string head) {
        line_ = std::move(head);
        empty_ = true;
    }

    void token(const std::string& t) {
        if (line_.size() + 1 + t.size() > max_line) {
            out_ << line_ << '\n';
            line_ = "  ";
        }
        line_ += ' ';
        line_ += t;
    }

    void terms(const LinearModel& m, const std::vector<Term>& terms) {
        for (const auto& t : terms) {
            const double mag = t.coef < 0.0 ? -t.coef : t.coef;
            const char* sign = t.coef < 0.0 ? "- " : (empty_ ? "" : "+ ");
            token(sign + text::format_double(mag) + " " + m.variables[t.var].name);
            empty_ = false;
        }
        if (empty_) token("0 " + m.variables.front().name);
    }

    void finish() { out_ << line_ << '\n'; }

private:
    std::ostream& out_;
    std::string line_;
    bool empty_ = true;
};

const char* relation_text(Relation r) {
    switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
    case Relation::greater_equal: return ">=";
    }
    return "<=";
}

} // namespace

void export_lp(const LinearModel& m, std::ostream& out) {
    validate(m);
    if (m.variables.empty()) throw ArgumentError("export_lp: model has no variables");
    LineWriter w(out);

    out << (m.objective.sense == Sense::maximize ? "Maximize" : "Minimize") << '\n';
    w.begin(" obj:");
    w.terms(m, m.objective.terms);
    w.finish();

    out << "Subject To\n";
    for (const auto& c : m.constraints) {
        w.begin(" " + c.name + ":");
        w.terms(m, c.terms);
        w.token(relation_text(c.relation));
        w.token(text::format_double(c.rhs));
        w.finish();
    }

    out << "Bounds\n";
    for (const auto& v : m.variables) {
        if (v.kind == VariableKind::binary) continue;
        out << ' ' << text::format_double(v.lower) << " <= " << v.name << " <= " << text::format_double(v.upper)
            << '\n';
    }

    bool any_binary = false;
    for (const auto& v : m.variables) any_binary = any_binary || v.kind == VariableKind::binary;
    if (any_binary) {
        out << "Binary\n";
        w.begin("");
        for (const auto& v : m.variables)
            if (v.kind == VariableKind::binary) w.token(v.name);
        w.finish();
    }
    out << "End\n";
    if (!out) throw std::ios_base::failure("export_lp: write failed");
}

} // namespace depsel

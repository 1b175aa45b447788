#include "pepa/condition.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace pepa {

Facts state_facts(const WorldState& s, const Building& b) {
    Facts f;
    const UserEvent* cmd = s.pending_command();
    f[Field::battery] = s.battery();
    f[Field::temp] = s.motor_temp;
    f[Field::clock] = s.clock;
    f[Field::mood] = s.mood;
    f[Field::floor] = s.floor;
    f[Field::recent_failures] = s.recent_failures();
    f[Field::active_streak] = s.active_streak;
    f[Field::pending] = static_cast<double>(s.pending_events.size());
    f[Field::command] = cmd ? static_cast<int>(cmd->category) + 1 : 0;
    f[Field::location] = s.location;
    f[Field::at_home] = s.location == b.home();
    f[Field::at_charger] = s.location == b.charger();
    f[Field::charging] = s.charging;
    f[Field::command_pending] = cmd != nullptr;
    return f;
}

void bind_action(Facts& f, const WorldState& s, const Action& a, const Building& b) {
    f[Field::category] = static_cast<int>(action_category(a, b));
    f[Field::kind] = static_cast<int>(a.kind);
    f[Field::target] = a.is_move() ? a.target : -1;
    f[Field::method] = a.is_move() ? static_cast<int>(a.method) + 1 : 0;
    f[Field::serves_command] = serves_command(s, a, b);
    f[Field::is_move] = a.is_move();
}

Facts make_facts(const WorldState& s, const Action& a, const Building& b) {
    Facts f = state_facts(s, b);
    bind_action(f, s, a, b);
    return f;
}

namespace {

enum class FieldType { numeric, symbolic, boolean };

struct FieldInfo {
    std::string_view name;
    Field field;
    FieldType type;
};

constexpr FieldInfo kFields[] = {
    {"battery", Field::battery, FieldType::numeric},
    {"temp", Field::temp, FieldType::numeric},
    {"clock", Field::clock, FieldType::numeric},
    {"mood", Field::mood, FieldType::numeric},
    {"floor", Field::floor, FieldType::numeric},
    {"recent_failures", Field::recent_failures, FieldType::numeric},
    {"active_streak", Field::active_streak, FieldType::numeric},
    {"pending", Field::pending, FieldType::numeric},
    {"category", Field::category, FieldType::symbolic},
    {"kind", Field::kind, FieldType::symbolic},
    {"command", Field::command, FieldType::symbolic},
    {"target", Field::target, FieldType::symbolic},
    {"method", Field::method, FieldType::symbolic},
    {"location", Field::location, FieldType::symbolic},
    {"at_home", Field::at_home, FieldType::boolean},
    {"at_charger", Field::at_charger, FieldType::boolean},
    {"charging", Field::charging, FieldType::boolean},
    {"serves_command", Field::serves_command, FieldType::boolean},
    {"command_pending", Field::command_pending, FieldType::boolean},
    {"is_move", Field::is_move, FieldType::boolean},
};

const FieldInfo* find_field(std::string_view name) {
    for (const auto& f : kFields)
        if (f.name == name) return &f;
    return nullptr;
}

struct Token {
    enum class Kind { ident, number, op, lparen, rparen, end } kind = Kind::end;
    std::string text;
    double number = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (c == '(' || c == ')') {
            t.kind = c == '(' ? Token::Kind::lparen : Token::Kind::rparen;
            t.text = std::string(1, c);
            ++i;
        } else if (c == '<' || c == '>' || c == '=' || c == '!') {
            t.kind = Token::Kind::op;
            if (i + 1 < s.size() && s[i + 1] == '=') {
                t.text = std::string(s.substr(i, 2));
                i += 2;
            } else {
                t.text = std::string(1, c);
                ++i;
            }
            if (t.text == "=" || t.text == "!") throw ConditionParseError(t.pos, "unknown operator '" + t.text + "'");
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            std::size_t j = i + 1;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == 'e' ||
                                    s[j] == 'E' || ((s[j] == '-' || s[j] == '+') && (s[j - 1] == 'e' || s[j - 1] == 'E'))))
                ++j;
            const auto str = s.substr(i, j - i);
            double v = 0;
            const auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
            if (ec != std::errc() || ptr != str.data() + str.size() || !std::isfinite(v))
                throw ConditionParseError(i, "malformed number '" + std::string(str) + "'");
            t.kind = Token::Kind::number;
            t.number = v;
            t.text = std::string(str);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Token::Kind::ident;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else {
            throw ConditionParseError(i, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

}  // namespace

class ConditionParser {
public:
    ConditionParser(std::string_view text, const Building& b, Condition& out)
        : tokens_(tokenize(text)), building_(b), out_(out) {}

    void run() {
        out_.root_ = parse_or();
        if (peek().kind != Token::Kind::end) throw ConditionParseError(peek().pos, "unexpected '" + peek().text + "'");
    }

private:
    const Token& peek() const { return tokens_[i_]; }
    const Token& next() { return tokens_[i_++]; }
    bool keyword(std::string_view kw) const { return peek().kind == Token::Kind::ident && peek().text == kw; }

    int push(Condition::Node n) {
        out_.nodes_.push_back(n);
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_or() {
        int lhs = parse_and();
        while (keyword("or")) {
            next();
            const int rhs = parse_and();
            lhs = push({Condition::Node::Op::or_, Field::battery, 0, lhs, rhs, true});
        }
        return lhs;
    }

    int parse_and() {
        int lhs = parse_unary();
        while (keyword("and")) {
            next();
            const int rhs = parse_unary();
            lhs = push({Condition::Node::Op::and_, Field::battery, 0, lhs, rhs, true});
        }
        return lhs;
    }

    int parse_unary() {
        const Token& t = peek();
        if (keyword("not")) {
            next();
            const int inner = parse_unary();
            return push({Condition::Node::Op::not_, Field::battery, 0, inner, -1, true});
        }
        if (t.kind == Token::Kind::lparen) {
            next();
            const int inner = parse_or();
            if (peek().kind != Token::Kind::rparen) throw ConditionParseError(peek().pos, "expected ')'");
            next();
            return inner;
        }
        if (keyword("true") || keyword("false")) {
            const bool v = next().text == "true";
            return push({Condition::Node::Op::constant, Field::battery, 0, -1, -1, v});
        }
        if (t.kind != Token::Kind::ident) throw ConditionParseError(t.pos, "expected a field name");
        return parse_comparison();
    }

    int parse_comparison() {
        const Token name = next();
        const FieldInfo* info = find_field(name.text);
        if (!info) throw ConditionParseError(name.pos, "unknown field '" + name.text + "'");
        out_.fields_.insert(info->field);
        if (info->type == FieldType::boolean) {
            if (peek().kind == Token::Kind::op) {
                const Token op = next();
                if (op.text != "==" && op.text != "!=")
                    throw ConditionParseError(op.pos, "boolean field '" + name.text + "' only supports == and !=");
                const Token v = next();
                if (v.kind != Token::Kind::ident || (v.text != "true" && v.text != "false"))
                    throw ConditionParseError(v.pos, "expected true or false after '" + name.text + "'");
                const bool want = (v.text == "true") == (op.text == "==");
                const int leaf = push({Condition::Node::Op::field_true, info->field, 0, -1, -1, true});
                return want ? leaf : push({Condition::Node::Op::not_, Field::battery, 0, leaf, -1, true});
            }
            return push({Condition::Node::Op::field_true, info->field, 0, -1, -1, true});
        }
        if (peek().kind != Token::Kind::op) throw ConditionParseError(peek().pos, "expected a comparison operator");
        const Token op = next();
        const Token v = next();
        Condition::Node n;
        n.field = info->field;
        n.op = op_of(op);
        if (info->type == FieldType::numeric) {
            if (v.kind != Token::Kind::number)
                throw ConditionParseError(v.pos, "field '" + name.text + "' compares against a number, got '" + v.text + "'");
            n.number = v.number;
        } else {
            if (n.op != Condition::Node::Op::eq && n.op != Condition::Node::Op::ne)
                throw ConditionParseError(op.pos, "symbolic field '" + name.text + "' only supports == and !=");
            if (v.kind != Token::Kind::ident)
                throw ConditionParseError(v.pos, "field '" + name.text + "' compares against a name, got '" + v.text + "'");
            n.number = symbol(info->field, v);
        }
        return push(n);
    }

    Condition::Node::Op op_of(const Token& t) const {
        using Op = Condition::Node::Op;
        if (t.text == "<") return Op::lt;
        if (t.text == "<=") return Op::le;
        if (t.text == ">") return Op::gt;
        if (t.text == ">=") return Op::ge;
        if (t.text == "==") return Op::eq;
        if (t.text == "!=") return Op::ne;
        throw ConditionParseError(t.pos, "unknown operator '" + t.text + "'");
    }

    double symbol(Field field, const Token& v) const {
        auto fail = [&]() -> double {
            throw ConditionParseError(v.pos, "'" + v.text + "' is not a valid value here");
        };
        switch (field) {
            case Field::category:
                if (auto c = parse_category(v.text)) return static_cast<int>(*c);
                return fail();
            case Field::kind:
                if (auto k = parse_action_kind(v.text)) return static_cast<int>(*k);
                return fail();
            case Field::command:
                if (v.text == "none") return 0;
                if (auto c = parse_event_category(v.text)) return static_cast<int>(*c) + 1;
                return fail();
            case Field::method:
                if (v.text == "none") return 0;
                if (auto m = parse_method(v.text)) return static_cast<int>(*m) + 1;
                return fail();
            case Field::target:
            case Field::location:
                if (v.text == "none") return -1;
                if (auto id = building_.find(v.text)) return *id;
                return fail();
            default:
                return fail();
        }
    }

    std::vector<Token> tokens_;
    std::size_t i_ = 0;
    const Building& building_;
    Condition& out_;
};

Condition Condition::compile(std::string_view text, const Building& building) {
    Condition c;
    c.text_ = std::string(text);
    ConditionParser(text, building, c).run();
    c.split_conjuncts();
    return c;
}

bool Condition::reads_action(int idx) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Node::Op::constant: return false;
        case Node::Op::not_: return reads_action(n.lhs);
        case Node::Op::and_:
        case Node::Op::or_: return reads_action(n.lhs) || reads_action(n.rhs);
        default: break;
    }
    switch (n.field) {
        case Field::category:
        case Field::kind:
        case Field::target:
        case Field::method:
        case Field::serves_command:
        case Field::is_move: return true;
        default: return false;
    }
}

void Condition::split_conjuncts() {
    std::vector<int> stack{root_};
    std::vector<int> conj;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.op == Node::Op::and_) {
            stack.push_back(n.rhs);
            stack.push_back(n.lhs);
        } else {
            conj.push_back(i);
        }
    }
    for (int i : conj) (reads_action(i) ? action_conj_ : state_conj_).push_back(i);
}

bool Condition::eval(const Facts& f) const { return eval_node(root_, f); }

bool Condition::eval_state(const Facts& f) const {
    for (int i : state_conj_)
        if (!eval_node(i, f)) return false;
    return true;
}

bool Condition::eval_action(const Facts& f) const {
    for (int i : action_conj_)
        if (!eval_node(i, f)) return false;
    return true;
}

bool Condition::eval_node(int idx, const Facts& f) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    using Op = Node::Op;
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::field_true: return f.flag(n.field);
        case Op::not_: return !eval_node(n.lhs, f);
        case Op::and_: return eval_node(n.lhs, f) && eval_node(n.rhs, f);
        case Op::or_: return eval_node(n.lhs, f) || eval_node(n.rhs, f);
        case Op::lt: return f[n.field] < n.number;
        case Op::le: return f[n.field] <= n.number;
        case Op::gt: return f[n.field] > n.number;
        case Op::ge: return f[n.field] >= n.number;
        case Op::eq: return f[n.field] == n.number;
        case Op::ne: return f[n.field] != n.number;
    }
    return false;
}

}  // namespace pepa

#include "tensorkit/parser.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <sstream>

#include "tensorkit/mapping.hpp"

namespace tk {

namespace {

// Matrix indices inserted automatically start life as high-ordinal
// placeholders; after the whole expression is assembled they are renamed to
// the lowest free stroke letters. Explicitly written strokes never collide
// with this range, which also makes re-parsing printed output idempotent.
constexpr uint32_t kPlaceholderBase = 1u << 20;

std::atomic<uint32_t> placeholderCounter{0};

IndexCode freshPlaceholder(IndexType t, bool upper) {
    return IndexCode(upper, t, kPlaceholderBase + placeholderCounter++);
}

bool hasPlaceholders(const ExprPtr& e) {
    std::set<uint32_t> names;
    collectAllNamesDeep(e, names);
    for (auto nt : names)
        if (IndexCode(nt).name() >= kPlaceholderBase) return true;
    return false;
}

struct MatrixFrees {
    std::map<IndexType, std::pair<std::vector<IndexCode>, std::vector<IndexCode>>> byType;
    bool any = false;
};

MatrixFrees matrixFrees(const ExprPtr& e) {
    MatrixFrees info;
    for (auto c : e->freeIndices()) {
        if (!isMatrixType(c.type())) continue;
        auto& entry = info.byType[c.type()];
        (c.upper() ? entry.first : entry.second).push_back(c);
        info.any = true;
    }
    for (auto& [t, e2] : info.byType) {
        (void)t;
        std::sort(e2.first.begin(), e2.first.end());
        std::sort(e2.second.begin(), e2.second.end());
    }
    return info;
}

// rename node's free matrix indices of each type positionally onto target
ExprPtr renameMatrixFreesOnto(
    const ExprPtr& e,
    const std::map<IndexType, std::pair<std::vector<IndexCode>, std::vector<IndexCode>>>& target) {
    auto mine = matrixFrees(e).byType;
    std::map<uint32_t, std::pair<uint32_t, bool>> ren;
    for (auto& [t, tslots] : target) {
        auto it = mine.find(t);
        if (it == mine.end()) continue;
        if (it->second.first.size() != tslots.first.size() ||
            it->second.second.size() != tslots.second.size())
            throw Error(ErrorKind::InconsistentIndices,
                        "matrix signatures of the expressions do not agree");
        for (size_t i = 0; i < tslots.first.size(); ++i)
            if (it->second.first[i].nameWithType() != tslots.first[i].nameWithType())
                ren[it->second.first[i].nameWithType()] = {tslots.first[i].nameWithType(), false};
        for (size_t i = 0; i < tslots.second.size(); ++i)
            if (it->second.second[i].nameWithType() != tslots.second[i].nameWithType())
                ren[it->second.second[i].nameWithType()] = {tslots.second[i].nameWithType(),
                                                            false};
    }
    return renameIndexNames(e, ren);
}

// key: plain name + metric part of the signature + arity
std::string matrixKey(const std::string& name, const Indices& indices, int arity) {
    std::vector<IndexCode> metric;
    for (auto c : indices)
        if (!isMatrixType(c.type())) metric.push_back(c);
    NameSignature sig = NameSignature::of(Indices::ordered(std::move(metric)), arity);
    return name + "#" + sig.key();
}

}  // namespace

ExprPtr composeMatrixProduct(std::vector<ExprPtr> factors) {
    bool anyPlaceholder = false;
    for (auto& f : factors)
        if (hasPlaceholders(f)) anyPlaceholder = true;
    if (!anyPlaceholder) return makeProduct(std::move(factors));

    std::set<IndexType> types;
    for (auto& f : factors)
        for (auto& [t, slots] : matrixFrees(f).byType) {
            (void)slots;
            types.insert(t);
        }

    for (IndexType t : types) {
        std::vector<IndexCode> openLower;
        for (auto& f : factors) {
            auto slots = matrixFrees(f).byType;
            auto it = slots.find(t);
            if (it == slots.end()) continue;
            const auto& uppers = it->second.first;
            const auto& lowers = it->second.second;
            size_t link = std::min(openLower.size(), uppers.size());
            std::map<uint32_t, std::pair<uint32_t, bool>> ren;
            for (size_t i = 0; i < link; ++i)
                ren[uppers[i].nameWithType()] = {openLower[i].nameWithType(), false};
            for (size_t i = link; i < uppers.size(); ++i)
                ren[uppers[i].nameWithType()] = {freshPlaceholder(t, true).nameWithType(), false};
            std::vector<IndexCode> newLowers;
            for (auto lc : lowers) {
                IndexCode freshCode = freshPlaceholder(t, false);
                ren[lc.nameWithType()] = {freshCode.nameWithType(), false};
                newLowers.push_back(freshCode);
            }
            for (auto iter = ren.begin(); iter != ren.end();) {
                if (iter->first == iter->second.first)
                    iter = ren.erase(iter);
                else
                    ++iter;
            }
            f = renameIndexNames(f, ren);
            std::vector<IndexCode> rest(openLower.begin() + link, openLower.end());
            rest.insert(rest.end(), newLowers.begin(), newLowers.end());
            openLower = std::move(rest);
        }
    }
    return makeProduct(std::move(factors));
}

namespace {

ExprPtr unifySumMatrixIndices(std::vector<ExprPtr> terms) {
    bool anyPlaceholder = false;
    for (auto& t : terms)
        if (hasPlaceholders(t)) anyPlaceholder = true;
    if (!anyPlaceholder) return makeSum(std::move(terms));

    std::map<IndexType, std::pair<std::vector<IndexCode>, std::vector<IndexCode>>> target;
    for (auto& t : terms) {
        auto info = matrixFrees(t);
        if (info.any) {
            target = info.byType;
            break;
        }
    }
    for (auto& t : terms) {
        auto info = matrixFrees(t);
        if (!info.any) {
            if (t->isZero()) continue;
            // scalar summand: multiply by the identity matrices
            std::vector<ExprPtr> fs = {t};
            for (auto& [ty, slots] : target) {
                (void)ty;
                if (slots.first.size() != 1 || slots.second.size() != 1)
                    throw Error(ErrorKind::InconsistentIndices,
                                "scalar summand in a non-square matrix sum");
                fs.push_back(makeMetric(slots.first[0], slots.second[0]));
            }
            t = makeProduct(std::move(fs));
        } else {
            t = renameMatrixFreesOnto(t, target);
        }
    }
    return makeSum(std::move(terms));
}

ExprPtr attachDeltas(
    const ExprPtr& side,
    const std::map<IndexType, std::pair<std::vector<IndexCode>, std::vector<IndexCode>>>& target) {
    if (side->isZero()) return side;
    std::vector<ExprPtr> fs = {side};
    for (auto& [ty, slots] : target) {
        (void)ty;
        if (slots.first.size() != 1 || slots.second.size() != 1)
            throw Error(ErrorKind::InconsistentIndices,
                        "cannot equate a scalar with a non-square matrix");
        fs.push_back(makeMetric(slots.first[0], slots.second[0]));
    }
    return makeProduct(std::move(fs));
}

// final pass: placeholder strokes become the lowest free stroke letters, in
// allocation order
ExprPtr finalizeMatrixPlaceholders(const ExprPtr& e) {
    std::set<uint32_t> names;
    collectAllNamesDeep(e, names);
    std::map<IndexType, std::vector<uint32_t>> placeholders;
    std::map<IndexType, std::set<uint32_t>> taken;
    for (auto nt : names) {
        IndexCode c(nt);
        if (!isMatrixType(c.type())) continue;
        if (c.name() >= kPlaceholderBase)
            placeholders[c.type()].push_back(nt);
        else
            taken[c.type()].insert(c.name());
    }
    if (placeholders.empty()) return e;
    std::map<uint32_t, std::pair<uint32_t, bool>> ren;
    for (auto& [t, list] : placeholders) {
        std::sort(list.begin(), list.end(),
                  [](uint32_t a, uint32_t b) { return IndexCode(a).name() < IndexCode(b).name(); });
        for (auto nt : list) {
            uint32_t fresh = Context::get().nextName(t, taken[t]);
            taken[t].insert(fresh);
            ren[nt] = {IndexCode(false, t, fresh).nameWithType(), false};
        }
    }
    return renameIndexNames(e, ren);
}

struct RawIndex {
    bool upper;
    IndexType type;
    uint32_t name;
    IndexCode code() const { return IndexCode(upper, type, name); }
};

class Parser {
public:
    explicit Parser(std::string text) : s_(std::move(text)) {}

    ExprPtr parseFull() {
        ExprPtr result = parseTop();
        return finalizeMatrixPlaceholders(result);
    }

    ExprPtr parseTop() {
        ExprPtr lhs = parseSumLevel();
        skipWs();
        if (!eof() && peek() == '=') {
            ++pos_;
            ExprPtr rhs = parseSumLevel();
            skipWs();
            if (!eof()) fail("unexpected trailing input");
            return buildRule(lhs, rhs);
        }
        if (!eof()) fail("unexpected trailing input");
        return lhs;
    }

private:
    std::string s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorKind::SyntaxError, msg + " at position " + std::to_string(pos_));
    }
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char peek2() const { return pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0'; }
    void skipWs() {
        while (!eof() && isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool consume(char c) {
        skipWs();
        if (!eof() && peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parseSumLevel() {
        std::vector<ExprPtr> terms;
        skipWs();
        bool negative = false;
        if (consume('-'))
            negative = true;
        else
            consume('+');
        ExprPtr t = parseTermLevel();
        terms.push_back(negative ? negate(t) : t);
        while (true) {
            skipWs();
            if (eof()) break;
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                ExprPtr nt = parseTermLevel();
                terms.push_back(c == '-' ? negate(nt) : nt);
            } else {
                break;
            }
        }
        if (terms.size() == 1) return terms[0];
        return unifySumMatrixIndices(std::move(terms));
    }

    ExprPtr parseTermLevel() {
        std::vector<ExprPtr> factors;
        factors.push_back(parseUnary());
        while (true) {
            skipWs();
            if (eof()) break;
            char c = peek();
            if (c == '*' && peek2() != '*') {
                ++pos_;
                factors.push_back(parseUnary());
            } else if (c == '/') {
                ++pos_;
                factors.push_back(makePower(parseUnary(), makeInt(-1)));
            } else {
                break;
            }
        }
        if (factors.size() == 1) return factors[0];
        return composeMatrixProduct(std::move(factors));
    }

    ExprPtr parseUnary() {
        skipWs();
        if (consume('-')) return negate(parseUnary());
        consume('+');
        return parsePowerLevel();
    }

    ExprPtr parsePowerLevel() {
        ExprPtr base = parseAtom();
        skipWs();
        if (!eof() && peek() == '*' && peek2() == '*') {
            pos_ += 2;
            ExprPtr exp = parseUnary();
            return makePower(base, exp);
        }
        return base;
    }

    ExprPtr parseAtom() {
        skipWs();
        if (eof()) fail("unexpected end of input");
        char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parseSumLevel();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (isdigit(static_cast<unsigned char>(c))) return parseNumber();
        if (isalpha(static_cast<unsigned char>(c)) || c == '\\') return parseNamed();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parseNumber() {
        size_t start = pos_;
        while (!eof() && isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        bool isFloat = false;
        if (!eof() && peek() == '.') {
            isFloat = true;
            ++pos_;
            while (!eof() && isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        std::string lit = s_.substr(start, pos_ - start);
        if (isFloat) return makeNumber(Complex::fromDouble(std::stod(lit)));
        return makeNumber(Complex(Rational(BigInt(lit))));
    }

    std::string parseNameToken() {
        skipWs();
        std::string name;
        if (peek() == '\\') {
            ++pos_;
            size_t start = pos_;
            while (!eof() && isalpha(static_cast<unsigned char>(peek()))) ++pos_;
            name = "\\" + s_.substr(start, pos_ - start);
        } else {
            size_t start = pos_;
            while (!eof() && isalnum(static_cast<unsigned char>(peek()))) ++pos_;
            name = s_.substr(start, pos_ - start);
        }
        if (name.empty() || name == "\\") fail("expected a name");
        return name;
    }

    RawIndex parseBracedIndexItem(bool upper) {
        RawIndex r;
        r.upper = upper;
        std::string tok;
        if (peek() == '\\') {
            ++pos_;
            size_t start = pos_;
            while (!eof() && isalpha(static_cast<unsigned char>(peek()))) ++pos_;
            tok = "\\" + s_.substr(start, pos_ - start);
        } else if (isalpha(static_cast<unsigned char>(peek()))) {
            tok = std::string(1, peek());
            ++pos_;
        } else {
            fail("expected an index");
        }
        uint32_t sub = 0;
        if (!eof() && peek() == '_') {
            size_t save = pos_;
            ++pos_;
            if (!eof() && peek() == '{') {
                ++pos_;
                size_t start = pos_;
                while (!eof() && isdigit(static_cast<unsigned char>(peek()))) ++pos_;
                if (pos_ == start || peek() != '}') {
                    pos_ = save;
                } else {
                    sub = static_cast<uint32_t>(std::stoul(s_.substr(start, pos_ - start)));
                    ++pos_;
                }
            } else if (!eof() && isdigit(static_cast<unsigned char>(peek()))) {
                size_t start = pos_;
                while (!eof() && isdigit(static_cast<unsigned char>(peek()))) ++pos_;
                sub = static_cast<uint32_t>(std::stoul(s_.substr(start, pos_ - start)));
            } else {
                pos_ = save;
            }
        }
        bool stroked = false;
        if (!eof() && peek() == '\'') {
            stroked = true;
            ++pos_;
        }
        auto looked = lookupIndexName(tok + (stroked ? "'" : ""));
        if (!looked) fail("unknown index '" + tok + "'");
        r.type = looked->first;
        r.name = looked->second + sub * alphabetSize(looked->first);
        return r;
    }

    void parseIndexGroup(bool upper, std::vector<RawIndex>& out) {
        if (consume('{')) {
            while (true) {
                skipWs();
                if (consume('}')) break;
                out.push_back(parseBracedIndexItem(upper));
            }
        } else {
            bool any = false;
            while (!eof()) {
                char c = peek();
                if (isalpha(static_cast<unsigned char>(c))) {
                    bool stroked = pos_ + 1 < s_.size() && s_[pos_ + 1] == '\'';
                    auto looked = lookupIndexName(std::string(1, c) + (stroked ? "'" : ""));
                    ++pos_;
                    if (stroked) ++pos_;
                    RawIndex r;
                    r.upper = upper;
                    r.type = looked->first;
                    r.name = looked->second;
                    out.push_back(r);
                    any = true;
                } else if (c == '\\') {
                    size_t save = pos_;
                    ++pos_;
                    size_t start = pos_;
                    while (!eof() && isalpha(static_cast<unsigned char>(peek()))) ++pos_;
                    std::string word = "\\" + s_.substr(start, pos_ - start);
                    bool stroked = !eof() && peek() == '\'';
                    auto looked = lookupIndexName(word + (stroked ? "'" : ""));
                    if (!looked) {
                        pos_ = save;
                        break;
                    }
                    if (stroked) ++pos_;
                    RawIndex r;
                    r.upper = upper;
                    r.type = looked->first;
                    r.name = looked->second;
                    out.push_back(r);
                    any = true;
                } else {
                    break;
                }
            }
            if (!any) fail("expected indices after '^' or '_'");
        }
    }

    ExprPtr parseNamed() {
        std::string name = parseNameToken();
        if (name == "I") return makeNumber(Complex::imaginaryUnit());

        std::vector<RawIndex> raw;
        while (!eof()) {
            if (peek() == '{' && peek2() == '}') {
                pos_ += 2;  // LaTeX-style spacer
                continue;
            }
            if (peek() != '^' && peek() != '_') break;
            bool upper = peek() == '^';
            ++pos_;
            parseIndexGroup(upper, raw);
        }

        skipWs();
        bool hasArgs = !eof() && peek() == '[';
        if (hasArgs && raw.empty()) {
            if (name == "Power") {
                auto args = parseArgs();
                if (args.size() != 2) fail("Power takes two arguments");
                return makePower(args[0].first, args[1].first);
            }
            if (name == "Tr") return parseTrace();
            if (auto fk = lookupFunction(name)) {
                auto args = parseArgs();
                if (args.size() != 1) fail(name + " takes one argument");
                return makeScalarFunction(*fk, args[0].first);
            }
        }

        std::vector<IndexCode> codes;
        for (auto& r : raw) codes.push_back(r.code());
        Indices indices = Indices::ordered(std::move(codes));
        {
            std::set<uint32_t> seen;
            for (auto c : indices.codes())
                if (!seen.insert(c.raw()).second)
                    throw Error(ErrorKind::InconsistentIndices,
                                "index " + c.toString() + " repeated in '" + name + "'");
        }

        if (hasArgs) {
            auto args = parseArgs();
            std::vector<ExprPtr> argExprs;
            std::vector<Indices> bindings;
            for (auto& [e, b] : args) {
                argExprs.push_back(e);
                bindings.push_back(b);
            }
            NameSignature sig = NameSignature::of(indices, static_cast<int>(argExprs.size()));
            NameId id = Context::get().intern(name, sig);
            ExprPtr field = makeTensorField(id, indices, std::move(argExprs), std::move(bindings));
            return maybeAttachMatrixIndices(field, name);
        }

        if ((name == "g" || name == "d") && indices.size() == 2 &&
            indices[0].type() == indices[1].type()) {
            if (isMetricType(indices[0].type())) {
                bool mixed = indices[0].upper() != indices[1].upper();
                if (name == "d" && !mixed)
                    fail("Kronecker delta requires one upper and one lower index");
                if (name == "g" || mixed) {
                    NameId id = Context::get().metricName(indices[0].type());
                    return makeSimpleTensor(id, indices);
                }
            } else if (name == "d" && indices[0].upper() != indices[1].upper()) {
                NameId id = Context::get().matrixDeltaName(indices[0].type());
                return makeSimpleTensor(id, indices);
            }
        }

        NameSignature sig = NameSignature::of(indices, -1);
        NameId id = Context::get().intern(name, sig);
        ExprPtr t = makeSimpleTensor(id, indices);
        return maybeAttachMatrixIndices(t, name);
    }

    std::vector<std::pair<ExprPtr, Indices>> parseArgs() {
        if (!consume('[')) fail("expected '['");
        std::vector<std::pair<ExprPtr, Indices>> args;
        while (true) {
            ExprPtr e = parseSumLevel();
            Indices binding;
            skipWs();
            if (!eof() && peek() == ':') {
                ++pos_;
                std::vector<RawIndex> raw;
                while (!eof() && (peek() == '^' || peek() == '_')) {
                    bool upper = peek() == '^';
                    ++pos_;
                    parseIndexGroup(upper, raw);
                }
                std::vector<IndexCode> codes;
                for (auto& r : raw) codes.push_back(r.code());
                binding = Indices::ordered(std::move(codes));
            }
            args.push_back({e, binding});
            skipWs();
            if (consume(']')) break;
            if (!consume(',')) fail("expected ',' or ']'");
        }
        return args;
    }

    ExprPtr parseTrace() {
        if (!consume('[')) fail("expected '[' after Tr");
        ExprPtr inner = parseSumLevel();
        std::vector<IndexType> types;
        skipWs();
        while (consume(',')) {
            std::string t = parseNameToken();
            if (t == "Matrix1") types.push_back(IndexType::Matrix1);
            else if (t == "Matrix2") types.push_back(IndexType::Matrix2);
            else if (t == "Matrix3") types.push_back(IndexType::Matrix3);
            else if (t == "Matrix4") types.push_back(IndexType::Matrix4);
            else fail("unknown matrix type '" + t + "'");
        }
        if (!consume(']')) fail("expected ']'");
        return closeTrace(inner, types);
    }

    ExprPtr buildRule(ExprPtr lhs, ExprPtr rhs) {
        if (hasPlaceholders(lhs) || hasPlaceholders(rhs)) {
            auto li = matrixFrees(lhs), ri = matrixFrees(rhs);
            if (!li.any && ri.any)
                lhs = attachDeltas(lhs, ri.byType);
            else if (li.any && !ri.any)
                rhs = attachDeltas(rhs, li.byType);
            else if (li.any && ri.any)
                rhs = renameMatrixFreesOnto(rhs, li.byType);
        }
        return makeRule(std::move(lhs), std::move(rhs));
    }

    ExprPtr maybeAttachMatrixIndices(const ExprPtr& e, const std::string& plainName) {
        for (auto c : e->indices())
            if (isMatrixType(c.type())) return e;  // explicit, leave as written
        int arity = -1;
        if (auto* f = as<TensorFieldExpr>(e)) arity = static_cast<int>(f->args().size());
        const auto* kinds =
            Context::get().matrixDescriptor(matrixKey(plainName, e->indices(), arity));
        if (!kinds) return e;
        std::vector<IndexCode> codes(e->indices().begin(), e->indices().end());
        for (auto& k : *kinds) {
            for (int i = 0; i < k.upper; ++i) codes.push_back(freshPlaceholder(k.type, true));
            for (int i = 0; i < k.lower; ++i) codes.push_back(freshPlaceholder(k.type, false));
        }
        Indices withMatrix = Indices::ordered(std::move(codes));
        if (auto* f = as<TensorFieldExpr>(e)) {
            NameSignature sig = NameSignature::of(withMatrix, static_cast<int>(f->args().size()));
            NameId id = Context::get().intern(Context::get().descriptor(f->name()).base, sig);
            return makeTensorField(id, withMatrix, f->args(), f->argBindings());
        }
        auto* st = as<SimpleTensorExpr>(e);
        NameSignature sig = NameSignature::of(withMatrix, -1);
        NameId id = Context::get().intern(Context::get().descriptor(st->name()).base, sig);
        return makeSimpleTensor(id, withMatrix);
    }
};

}  // namespace

ExprPtr closeTrace(const ExprPtr& e, std::vector<IndexType> types) {
    auto info = matrixFrees(e);
    if (!info.any) return e;
    if (types.empty())
        for (auto& [t, slots] : info.byType) {
            (void)slots;
            types.push_back(t);
        }
    ExprPtr result = e;
    for (IndexType t : types) {
        auto slots = matrixFrees(result).byType;
        auto it = slots.find(t);
        if (it == slots.end()) continue;
        if (it->second.first.size() != 1 || it->second.second.size() != 1)
            throw Error(ErrorKind::Unsupported,
                        "trace requires exactly one upper and one lower matrix index");
        IndexCode up = it->second.first[0], low = it->second.second[0];
        std::map<uint32_t, std::pair<uint32_t, bool>> ren;
        ren[low.nameWithType()] = {up.nameWithType(), false};
        if (auto* sum = as<SumExpr>(result)) {
            std::vector<ExprPtr> ts;
            for (auto& term : sum->terms()) ts.push_back(renameIndexNames(term, ren));
            result = makeSum(std::move(ts));
        } else {
            result = renameIndexNames(result, ren);
        }
    }
    return result;
}

void defineMatrices(const std::vector<std::pair<std::string, std::vector<std::string>>>& entries) {
    for (auto& [pattern, kindSpecs] : entries) {
        std::vector<MatrixSignature> kinds;
        for (auto& kindSpec : kindSpecs) {
        MatrixSignature ms;
        auto dot = kindSpec.find('.');
        if (dot == std::string::npos)
            throw Error(ErrorKind::SyntaxError, "matrix kind must look like Matrix1.matrix");
        std::string typeName = kindSpec.substr(0, dot), kind = kindSpec.substr(dot + 1);
        if (typeName == "Matrix1") ms.type = IndexType::Matrix1;
        else if (typeName == "Matrix2") ms.type = IndexType::Matrix2;
        else if (typeName == "Matrix3") ms.type = IndexType::Matrix3;
        else if (typeName == "Matrix4") ms.type = IndexType::Matrix4;
        else throw Error(ErrorKind::SyntaxError, "unknown matrix type '" + typeName + "'");
        if (kind == "matrix") {
            ms.upper = ms.lower = 1;
        } else if (kind == "vector") {
            ms.upper = 1;
        } else if (kind == "covector") {
            ms.lower = 1;
        } else if (kind.rfind("tensor(", 0) == 0 && kind.back() == ')') {
            std::string body = kind.substr(7, kind.size() - 8);
            auto comma = body.find(',');
            if (comma == std::string::npos)
                throw Error(ErrorKind::SyntaxError, "tensor(p, q) expects two numbers");
            ms.upper = std::stoi(body.substr(0, comma));
            ms.lower = std::stoi(body.substr(comma + 1));
        } else {
            throw Error(ErrorKind::SyntaxError, "unknown matrix kind '" + kind + "'");
        }
        kinds.push_back(ms);
        }

        Parser p(pattern);
        ExprPtr node = p.parseTop();
        std::string base;
        Indices ownIndices;
        int arity = -1;
        if (auto* f = as<TensorFieldExpr>(node)) {
            base = Context::get().descriptor(f->name()).base;
            ownIndices = f->indices();
            arity = static_cast<int>(f->args().size());
        } else if (auto* st = as<SimpleTensorExpr>(node)) {
            base = Context::get().descriptor(st->name()).base;
            ownIndices = st->indices();
        } else {
            throw Error(ErrorKind::SyntaxError,
                        "matrix pattern must be a simple tensor or a tensor field");
        }
        Context::get().defineMatrix(matrixKey(base, ownIndices, arity), kinds);
    }
}

ExprPtr parse(const std::string& text) {
    Parser p(text);
    return p.parseFull();
}

Indices parseIndicesSpec(const std::string& text) {
    Parser p("ZZindicesZZ" + text);
    ExprPtr node = p.parseFull();
    return node->indices();
}

SignedPermutation parsePermutation(const std::vector<int>& v) {
    SignedPermutation p;
    p.images.assign(v.begin(), v.end());
    std::vector<int> sorted = p.images;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i))
            throw Error(ErrorKind::InconsistentGenerators, "not a permutation");
    return p;
}

}  // namespace tk

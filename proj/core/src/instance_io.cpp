#include <cstdio>
#include <fstream>
#include <sstream>

#include "bilevel/instances.hpp"

// Instance files are self-describing text: a format-version line, scalar
// header fields, then field-tagged matrices in row-major decimal. All
// numbers are written with 17 significant digits in C-locale formatting,
// so read(write(x)) is exact.

namespace bilevel {

namespace {

constexpr const char* kMagic = "bilevel-quad-instance";
constexpr const char* kVersion = "v1";

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class TokenReader {
public:
    explicit TokenReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::string next(const char* what) {
        std::string tok;
        while (!(line_stream_ >> tok)) {
            if (!std::getline(in_, line_)) {
                throw ParseError(name_ + ": unexpected end of file while reading " + std::string(what) +
                                 " (line " + std::to_string(line_no_) + ")");
            }
            ++line_no_;
            line_stream_ = std::istringstream(line_);
        }
        return tok;
    }

    void expect(const char* literal) {
        const std::string tok = next(literal);
        if (tok != literal)
            throw ParseError(name_ + ": expected '" + literal + "' but found '" + tok + "' (line " +
                             std::to_string(line_no_) + ")");
    }

    double number(const char* what) {
        const std::string tok = next(what);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw ParseError(name_ + ": bad number '" + tok + "' in field " + std::string(what) +
                             " (line " + std::to_string(line_no_) + ")");
        return value;
    }

    std::size_t count(const char* what) {
        const double v = number(what);
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ParseError(name_ + ": field " + std::string(what) + " must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::string name_;
    std::string line_;
    std::istringstream line_stream_;
    int line_no_ = 0;
};

void write_vector(std::ostream& out, const char* tag, const Vector& v) {
    out << tag;
    for (double x : v) out << ' ' << format_number(x);
    out << '\n';
}

void write_matrix(std::ostream& out, const char* tag, const Matrix& m) {
    out << tag;
    for (double x : m.data()) out << ' ' << format_number(x);
    out << '\n';
}

Vector read_vector(TokenReader& r, const char* tag, std::size_t len) {
    r.expect(tag);
    Vector v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = r.number(tag);
    return v;
}

Matrix read_matrix(TokenReader& r, const char* tag, std::size_t rows, std::size_t cols) {
    r.expect(tag);
    Matrix m(rows, cols);
    for (double& x : m.data()) x = r.number(tag);
    return m;
}

}  // namespace

void write_instance(const StoredInstance& stored, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_instance: cannot open " + path.string());
    const QuadBilevelInstance& inst = stored.inst;
    out << kMagic << ' ' << kVersion << '\n';
    out << "id " << (stored.id.empty() ? "unnamed" : stored.id) << '\n';
    out << "q_kind " << to_string(stored.q_kind) << '\n';
    out << "sense " << to_string(inst.sense) << '\n';
    out << "n_x " << inst.n_x << '\n';
    out << "n_y " << inst.n_y << '\n';
    out << "m_x " << inst.A.rows() << '\n';
    write_vector(out, "h_x", inst.h_x);
    write_vector(out, "d_x", inst.d_x);
    write_matrix(out, "A", inst.A);
    write_vector(out, "b", inst.b);
    write_matrix(out, "Q_y", inst.Q_y);
    write_matrix(out, "C_y", inst.C_y);
    write_vector(out, "d_y", inst.d_y);
    out << "end\n";
    if (!out) throw IoError("write_instance: write failed for " + path.string());
}

StoredInstance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_instance: cannot open " + path.string());
    TokenReader r(in, path.filename().string());

    r.expect(kMagic);
    const std::string version = r.next("format version");
    if (version != kVersion)
        throw ParseError(path.filename().string() + ": unsupported format version '" + version + "'");

    StoredInstance stored;
    r.expect("id");
    stored.id = r.next("id");
    r.expect("q_kind");
    stored.q_kind = q_kind_from_string(r.next("q_kind"));
    r.expect("sense");
    const std::string sense = r.next("sense");
    if (sense == "optimistic") {
        stored.inst.sense = Sense::optimistic;
    } else if (sense == "pessimistic") {
        stored.inst.sense = Sense::pessimistic;
    } else {
        throw ParseError(path.filename().string() + ": unknown sense tag: " + sense);
    }
    r.expect("n_x");
    stored.inst.n_x = r.count("n_x");
    r.expect("n_y");
    stored.inst.n_y = r.count("n_y");
    r.expect("m_x");
    const std::size_t m_x = r.count("m_x");

    QuadBilevelInstance& inst = stored.inst;
    inst.h_x = read_vector(r, "h_x", inst.n_x);
    inst.d_x = read_vector(r, "d_x", inst.n_y);
    inst.A = read_matrix(r, "A", m_x, inst.n_x);
    inst.b = read_vector(r, "b", m_x);
    inst.Q_y = read_matrix(r, "Q_y", inst.n_y, inst.n_y);
    inst.C_y = read_matrix(r, "C_y", inst.n_y, inst.n_x);
    inst.d_y = read_vector(r, "d_y", inst.n_y);
    r.expect("end");
    return stored;
}

}  // namespace bilevel

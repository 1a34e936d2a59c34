#include "cause/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cause {

bool EmbeddingModel::finite() const {
    auto ok = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return std::isfinite(s);
    };
    return ok(gamma_c) && ok(gamma_t) && ok(theta_c) && ok(theta_t) && ok(user_bias) &&
           ok(item_bias) && std::isfinite(global_bias) && std::isfinite(alpha);
}

void EmbeddingModel::check_finite() const {
    if (!finite())
        throw Error(ErrorKind::NumericalFailure, "model parameters contain NaN or Inf");
}

EmbeddingModel init_model(std::size_t n_users, std::size_t n_items, std::size_t d,
                          std::uint64_t seed) {
    EmbeddingModel m;
    m.n_users = n_users;
    m.n_items = n_items;
    m.d = d;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    auto fill = [&](std::vector<double>& v, std::size_t n, const char* stream) {
        Rng rng(seed, stream);
        v.resize(n);
        for (auto& x : v) x = rng.uniform(-bound, bound);
    };
    fill(m.gamma_c, n_users * d, "init.gamma_c");
    fill(m.gamma_t, n_users * d, "init.gamma_t");
    fill(m.theta_c, n_items * d, "init.theta_c");
    fill(m.theta_t, n_items * d, "init.theta_t");
    m.user_bias.assign(n_users, 0.0);
    m.item_bias.assign(n_items, 0.0);
    m.global_bias = 0.0;
    m.alpha = 1.0;
    return m;
}

namespace {

void write_matrix(std::FILE* f, const char* name, const std::vector<double>& v,
                  std::size_t rows, std::size_t cols) {
    std::fprintf(f, "%s\n", name);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c)
            std::fprintf(f, c == 0 ? "%.17g" : " %.17g", v[r * cols + c]);
        std::fprintf(f, "\n");
    }
}

struct Reader {
    std::ifstream in;
    std::size_t line_no = 0;
    std::string path;

    std::string next_line() {
        std::string line;
        if (!std::getline(in, line))
            throw Error(ErrorKind::FormatError,
                        path + ": unexpected end of file after line " + std::to_string(line_no));
        ++line_no;
        return line;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorKind::FormatError,
                    path + ": line " + std::to_string(line_no) + ": " + what);
    }

    void expect_header(const std::string& name) {
        std::string line = next_line();
        if (line != name) fail("expected block '" + name + "', got '" + line + "'");
    }

    void read_matrix(const std::string& name, std::vector<double>& v, std::size_t rows,
                     std::size_t cols) {
        expect_header(name);
        v.resize(rows * cols);
        for (std::size_t r = 0; r < rows; ++r) {
            std::istringstream row(next_line());
            for (std::size_t c = 0; c < cols; ++c)
                if (!(row >> v[r * cols + c])) fail("short row in block " + name);
            double extra;
            if (row >> extra) fail("excess values in block " + name);
        }
    }
};

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error(ErrorKind::IoError, "cannot write model file: " + path);
    std::fprintf(f, "%s\n", kModelFormatVersion);
    std::fprintf(f, "%zu %zu %zu\n", model.n_users, model.n_items, model.d);
    write_matrix(f, "GAMMA_C", model.gamma_c, model.n_users, model.d);
    write_matrix(f, "GAMMA_T", model.gamma_t, model.n_users, model.d);
    write_matrix(f, "THETA_C", model.theta_c, model.n_items, model.d);
    write_matrix(f, "THETA_T", model.theta_t, model.n_items, model.d);
    write_matrix(f, "USER_BIAS", model.user_bias, 1, model.n_users);
    write_matrix(f, "ITEM_BIAS", model.item_bias, 1, model.n_items);
    std::fprintf(f, "GLOBAL_BIAS\n%.17g\n", model.global_bias);
    std::fprintf(f, "ALPHA\n%.17g\n", model.alpha);
    std::fclose(f);
}

EmbeddingModel load_model(const std::string& path) {
    Reader r;
    r.path = path;
    r.in.open(path);
    if (!r.in) throw Error(ErrorKind::IoError, "cannot open model file: " + path);

    std::string magic = r.next_line();
    if (magic != kModelFormatVersion)
        r.fail("unsupported model header '" + magic + "'");

    EmbeddingModel m;
    {
        std::istringstream dims(r.next_line());
        if (!(dims >> m.n_users >> m.n_items >> m.d) || m.d == 0)
            r.fail("bad dimension line");
    }
    r.read_matrix("GAMMA_C", m.gamma_c, m.n_users, m.d);
    r.read_matrix("GAMMA_T", m.gamma_t, m.n_users, m.d);
    r.read_matrix("THETA_C", m.theta_c, m.n_items, m.d);
    r.read_matrix("THETA_T", m.theta_t, m.n_items, m.d);
    r.read_matrix("USER_BIAS", m.user_bias, 1, m.n_users);
    r.read_matrix("ITEM_BIAS", m.item_bias, 1, m.n_items);
    std::vector<double> scalar;
    r.read_matrix("GLOBAL_BIAS", scalar, 1, 1);
    m.global_bias = scalar[0];
    r.read_matrix("ALPHA", scalar, 1, 1);
    m.alpha = scalar[0];
    return m;
}

}  // namespace cause

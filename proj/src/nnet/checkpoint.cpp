// Text checkpoints.
//
//   mlp layer_sizes <n0> <n1> ... output_blocks <b0> <b1> ...
//   W<l> <rows> <cols>      one line per row (input unit), cols = out units
//   b<l> 1 <cols>
//
// A net pair file starts with `netpair p_drop <p>` followed by the transition
// and observation nets in that order. Numbers are written in shortest
// round-trip decimal form, so a save/load cycle is exact.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "baddr/nnet.hpp"

namespace baddr {

namespace {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double x = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw std::runtime_error("checkpoint: bad number '" + token + "'");
    return x;
}

std::string expect_word(std::istream& in, const std::string& word) {
    std::string tok;
    if (!(in >> tok) || tok != word) throw std::runtime_error("checkpoint: expected '" + word + "', got '" + tok + "'");
    return tok;
}

int read_int(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("checkpoint: unexpected end of input");
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw std::runtime_error("checkpoint: bad integer '" + tok + "'");
    return v;
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
    const MlpShape& shape = net.shape();
    out << "mlp layer_sizes";
    for (int s : shape.layer_sizes()) out << ' ' << s;
    out << " output_blocks";
    for (int b : shape.output_blocks()) out << ' ' << b;
    out << '\n';
    for (int l = 0; l < shape.layer_count(); ++l) {
        const int in = shape.layer_sizes()[static_cast<std::size_t>(l)];
        const int cols = shape.layer_sizes()[static_cast<std::size_t>(l) + 1];
        const auto w = net.weights(l);
        out << 'W' << l << ' ' << in << ' ' << cols << '\n';
        for (int i = 0; i < in; ++i) {
            for (int j = 0; j < cols; ++j) {
                if (j) out << ' ';
                out << format_double(w[static_cast<std::size_t>(i * cols + j)]);
            }
            out << '\n';
        }
        const auto b = net.biases(l);
        out << 'b' << l << " 1 " << cols << '\n';
        for (int j = 0; j < cols; ++j) {
            if (j) out << ' ';
            out << format_double(b[static_cast<std::size_t>(j)]);
        }
        out << '\n';
    }
}

Mlp read_mlp(std::istream& in) {
    expect_word(in, "mlp");
    expect_word(in, "layer_sizes");
    std::vector<int> sizes;
    std::vector<int> blocks;
    std::string tok;
    while (in >> tok && tok != "output_blocks") sizes.push_back(static_cast<int>(parse_double(tok)));
    if (tok != "output_blocks") throw std::runtime_error("checkpoint: missing output_blocks");
    std::string line;
    std::getline(in, line);
    std::istringstream blocks_in(line);
    while (blocks_in >> tok) blocks.push_back(static_cast<int>(parse_double(tok)));
    auto shape = std::make_shared<const MlpShape>(sizes, blocks);
    std::vector<double> params(shape->param_count());
    for (int l = 0; l < shape->layer_count(); ++l) {
        const int rows = sizes[static_cast<std::size_t>(l)];
        const int cols = sizes[static_cast<std::size_t>(l) + 1];
        expect_word(in, "W" + std::to_string(l));
        if (read_int(in) != rows || read_int(in) != cols) throw std::runtime_error("checkpoint: weight shape mismatch");
        for (std::size_t k = 0; k < static_cast<std::size_t>(rows * cols); ++k) {
            if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated weights");
            params[shape->weight_offset(l) + k] = parse_double(tok);
        }
        expect_word(in, "b" + std::to_string(l));
        if (read_int(in) != 1 || read_int(in) != cols) throw std::runtime_error("checkpoint: bias shape mismatch");
        for (std::size_t k = 0; k < static_cast<std::size_t>(cols); ++k) {
            if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated biases");
            params[shape->bias_offset(l) + k] = parse_double(tok);
        }
    }
    return Mlp(std::move(shape), std::move(params));
}

void write_net_pair(std::ostream& out, const NetPair& pair) {
    out << "netpair p_drop " << format_double(pair.p_drop) << '\n';
    write_mlp(out, pair.transition);
    write_mlp(out, pair.observation);
}

NetPair read_net_pair(std::istream& in) {
    expect_word(in, "netpair");
    expect_word(in, "p_drop");
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("checkpoint: missing p_drop");
    const double p_drop = parse_double(tok);
    Mlp t = read_mlp(in);
    Mlp o = read_mlp(in);
    return NetPair{std::move(t), std::move(o), p_drop};
}

void save_net_pair(const std::string& path, const NetPair& pair) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    write_net_pair(out, pair);
    if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

NetPair load_net_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint " + path);
    return read_net_pair(in);
}

}  // namespace baddr

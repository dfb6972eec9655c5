#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "crynet/model.hpp"

namespace crynet::model {

namespace {

constexpr char kMagic[4] = {'C', 'R', 'Y', 'N'};
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void put_i32(std::vector<uint8_t>& out, int32_t v) { put_u32(out, uint32_t(v)); }
void put_f64(std::vector<uint8_t>& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t(bits >> (8 * i)));
}
void put_str(std::vector<uint8_t>& out, const std::string& s) {
    put_u32(out, uint32_t(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct Reader {
    const uint8_t* p;
    size_t n;
    size_t off = 0;

    void need(size_t k) const {
        if (off + k > n) throw ParseError("model file truncated");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p[off + size_t(i)]) << (8 * i);
        off += 4;
        return v;
    }
    int32_t i32() { return int32_t(u32()); }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= uint64_t(p[off + size_t(i)]) << (8 * i);
        off += 8;
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    std::string str() {
        uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(p + off), len);
        off += len;
        return s;
    }
};

void put_tensor_dims(std::vector<uint8_t>& out, const nnet::Tensor& t) {
    put_i32(out, t.h);
    put_i32(out, t.w);
    put_i32(out, t.c);
}

}  // namespace

void save_model(const std::string& path, const nnet::Graph& g) {
    if (!g.finalized()) throw ValidationError("save_model: graph not finalized");
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    put_i32(out, g.input_shape().h);
    put_i32(out, g.input_shape().w);
    put_i32(out, g.input_shape().c);
    put_u32(out, uint32_t(g.node_count()));

    for (size_t i = 0; i < g.node_count(); ++i) {
        const nnet::Node& n = g.node(int(i));
        put_str(out, n.name);
        put_u32(out, uint32_t(n.spec.kind));
        put_i32(out, n.spec.filters);
        put_i32(out, n.spec.kernel);
        put_i32(out, n.spec.stride);
        put_u32(out, n.spec.pad_same ? 1 : 0);
        put_i32(out, n.spec.pool);
        put_i32(out, n.spec.pool_stride);
        put_i32(out, n.spec.units);
        put_f64(out, n.spec.l2);
        put_f64(out, n.spec.keep_prob);
        put_u32(out, uint32_t(n.inputs.size()));
        for (int idx : n.inputs) put_i32(out, idx);
        put_tensor_dims(out, n.w);
        put_tensor_dims(out, n.b);
    }
    for (size_t i = 0; i < g.node_count(); ++i) {
        const nnet::Node& n = g.node(int(i));
        for (double v : n.w.v) put_f64(out, v);
        for (double v : n.b.v) put_f64(out, v);
    }
    uLong crc = crc32(0L, out.data(), uInt(out.size()));
    put_u32(out, uint32_t(crc));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open model file for writing: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    f.flush();
    if (!f) {
        f.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw IoError("model write failed: " + path);
    }
}

nnet::Graph load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open model file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() < 12) throw ParseError(path + ": model file truncated");

    uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i) {
        stored_crc |= uint32_t(bytes[bytes.size() - 4 + size_t(i)]) << (8 * i);
    }
    uLong crc = crc32(0L, bytes.data(), uInt(bytes.size() - 4));
    if (uint32_t(crc) != stored_crc) throw ParseError(path + ": model checksum mismatch");

    Reader r{bytes.data(), bytes.size() - 4};
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ParseError(path + ": bad magic bytes (not a model file)");
    }
    r.off = 4;
    if (r.u32() != kVersion) throw UnsupportedFormatError(path + ": unknown model version");

    nnet::Shape input_shape{r.i32(), r.i32(), r.i32()};
    const uint32_t n_nodes = r.u32();
    if (n_nodes == 0 || n_nodes > 10000) throw ParseError(path + ": implausible node count");

    nnet::Graph g;
    struct Dims {
        int wh, ww, wc, bh, bw, bc;
    };
    std::vector<Dims> dims(n_nodes);
    for (uint32_t i = 0; i < n_nodes; ++i) {
        std::string name = r.str();
        nnet::LayerSpec spec;
        spec.kind = nnet::LayerKind(r.u32());
        spec.filters = r.i32();
        spec.kernel = r.i32();
        spec.stride = r.i32();
        spec.pad_same = r.u32() != 0;
        spec.pool = r.i32();
        spec.pool_stride = r.i32();
        spec.units = r.i32();
        spec.l2 = r.f64();
        spec.keep_prob = r.f64();
        const uint32_t n_in = r.u32();
        std::vector<int> inputs;
        inputs.reserve(n_in);
        for (uint32_t k = 0; k < n_in; ++k) inputs.push_back(r.i32());
        dims[i] = {r.i32(), r.i32(), r.i32(), r.i32(), r.i32(), r.i32()};
        if (i == 0) {
            if (spec.kind != nnet::LayerKind::Input) {
                throw ParseError(path + ": first node is not an input");
            }
            g.add_input(name);
        } else {
            g.add(name, spec, std::move(inputs));
        }
    }
    g.finalize(input_shape, 0);
    for (uint32_t i = 0; i < n_nodes; ++i) {
        nnet::Node& n = g.node(int(i));
        if (n.w.h != dims[i].wh || n.w.w != dims[i].ww || n.w.c != dims[i].wc ||
            n.b.h != dims[i].bh || n.b.w != dims[i].bw || n.b.c != dims[i].bc) {
            throw ParseError(path + ": stored dims disagree with inferred shapes at node '" +
                             n.name + "'");
        }
        for (double& v : n.w.v) v = r.f64();
        for (double& v : n.b.v) v = r.f64();
    }
    if (r.off != r.n) throw ParseError(path + ": trailing bytes in model file");
    return g;
}

void save_history_csv(const std::string& path, const TrainHistory& history) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open history file: " + path);
    f << "epoch,loss,accuracy\n";
    f.precision(12);
    for (const auto& e : history.epochs) {
        f << e.epoch << "," << e.loss << "," << e.accuracy << "\n";
    }
    if (!f) throw IoError("history write failed: " + path);
}

}  // namespace crynet::model

#include "prlc/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace prlc {

namespace {

// explicit little-endian packing, independent of host byte order
template <class T>
void put(std::string& buf, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
#endif
    buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T take(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) throw NumericalError("checkpoint: truncated file");
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
#endif
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

void push_group(std::string& buf, const U1& g) {
    put(buf, g.re);
    put(buf, g.im);
}
void push_group(std::string& buf, const SU2& g) {
    put(buf, g.x);
    put(buf, g.y);
    put(buf, g.w);
    put(buf, g.z);
}
void pull_group(std::istream& in, U1& g) {
    g.re = take<double>(in);
    g.im = take<double>(in);
}
void pull_group(std::istream& in, SU2& g) {
    g.x = take<double>(in);
    g.y = take<double>(in);
    g.w = take<double>(in);
    g.z = take<double>(in);
}

template <class M, class Chain>
void save_impl(const std::string& path, const Chain& c, bool joint, const GaugeField<M>& gauge,
               const HiggsConfig<M>* higgs, double higgs_step) {
    const Lattice& lat = *gauge.lat;
    std::string buf;
    buf.append("PRLC", 4);
    put<uint16_t>(buf, 1);
    put<uint8_t>(buf, M::tag == GroupTag::su2 ? 1 : 0);
    put<uint8_t>(buf, lat.mode() == BoundaryMode::free ? 1 : 0);
    put<uint8_t>(buf, joint ? 1 : 0);
    put<uint32_t>(buf, static_cast<uint32_t>(lat.dim()));
    put<uint32_t>(buf, static_cast<uint32_t>(lat.half_width()));
    put<uint64_t>(buf, static_cast<uint64_t>(c.sweep));
    put<uint64_t>(buf, c.seed);
    put<uint64_t>(buf, c.chain_id);
    put<double>(buf, c.edge_step);
    put<double>(buf, higgs_step);
    put<uint64_t>(buf, static_cast<uint64_t>(lat.n_edges()));
    put<uint64_t>(buf, static_cast<uint64_t>(joint ? lat.n_vertices() : 0));
    for (const auto& g : gauge.e) push_group(buf, g);
    if (joint)
        for (const auto& h : higgs->s) push_group(buf, h);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("checkpoint: cannot open " + path + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw NumericalError("checkpoint: write failed for " + path);
}

struct Header {
    CheckpointInfo info;
    uint64_t sweep, seed, chain_id;
    double edge_step, higgs_step;
    uint64_t n_edges, n_sites;
};

Header read_header(std::istream& in, const std::string& path) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PRLC", 4) != 0)
        throw NumericalError("checkpoint: bad magic in " + path);
    const uint16_t version = take<uint16_t>(in);
    if (version != 1)
        throw NumericalError("checkpoint: unsupported format version " + std::to_string(version));
    Header h;
    h.info.group = take<uint8_t>(in) ? GroupTag::su2 : GroupTag::u1;
    h.info.mode = take<uint8_t>(in) ? BoundaryMode::free : BoundaryMode::torus;
    h.info.joint = take<uint8_t>(in) != 0;
    h.info.d = static_cast<int>(take<uint32_t>(in));
    h.info.half_width = static_cast<int>(take<uint32_t>(in));
    h.sweep = take<uint64_t>(in);
    h.info.sweep = static_cast<long>(h.sweep);
    h.seed = take<uint64_t>(in);
    h.chain_id = take<uint64_t>(in);
    h.edge_step = take<double>(in);
    h.higgs_step = take<double>(in);
    h.n_edges = take<uint64_t>(in);
    h.n_sites = take<uint64_t>(in);
    return h;
}

template <class M, class Chain>
void load_impl(const std::string& path, Chain& c, bool expect_joint, GaugeField<M>& gauge,
               HiggsConfig<M>* higgs, double* higgs_step) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericalError("checkpoint: cannot open " + path);
    const Header h = read_header(in, path);
    if ((h.info.group == GroupTag::su2) != (M::tag == GroupTag::su2))
        throw NumericalError("checkpoint: group tag mismatch");
    if (h.info.joint != expect_joint) throw NumericalError("checkpoint: chain kind mismatch");

    auto lat = build_lattice(h.info.d, h.info.half_width, h.info.mode);
    if (h.n_edges != static_cast<uint64_t>(lat->n_edges()))
        throw NumericalError("checkpoint: edge count mismatch");
    gauge = GaugeField<M>(lat);
    for (auto& g : gauge.e) pull_group(in, g);
    if (expect_joint) {
        if (h.n_sites != static_cast<uint64_t>(lat->n_vertices()))
            throw NumericalError("checkpoint: site count mismatch");
        *higgs = HiggsConfig<M>(lat);
        for (auto& s : higgs->s) pull_group(in, s);
    }
    c.sweep = static_cast<long>(h.sweep);
    c.seed = h.seed;
    c.chain_id = h.chain_id;
    c.edge_step = h.edge_step;
    if (higgs_step) *higgs_step = h.higgs_step;
}

}  // namespace

void save_checkpoint(const std::string& path, const JointChain<U1Model>& c) {
    save_impl<U1Model>(path, c, true, c.u, &c.phi, c.higgs_step);
}
void save_checkpoint(const std::string& path, const JointChain<SU2Model>& c) {
    save_impl<SU2Model>(path, c, true, c.u, &c.phi, c.higgs_step);
}
void save_checkpoint(const std::string& path, const FixedChain<U1Model>& c) {
    save_impl<U1Model>(path, c, false, c.v, nullptr, 0.0);
}
void save_checkpoint(const std::string& path, const FixedChain<SU2Model>& c) {
    save_impl<SU2Model>(path, c, false, c.v, nullptr, 0.0);
}

CheckpointInfo peek_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericalError("checkpoint: cannot open " + path);
    return read_header(in, path).info;
}

void load_checkpoint(const std::string& path, JointChain<U1Model>& c) {
    load_impl<U1Model>(path, c, true, c.u, &c.phi, &c.higgs_step);
}
void load_checkpoint(const std::string& path, JointChain<SU2Model>& c) {
    load_impl<SU2Model>(path, c, true, c.u, &c.phi, &c.higgs_step);
}
void load_checkpoint(const std::string& path, FixedChain<U1Model>& c) {
    load_impl<U1Model>(path, c, false, c.v, nullptr, nullptr);
}
void load_checkpoint(const std::string& path, FixedChain<SU2Model>& c) {
    load_impl<SU2Model>(path, c, false, c.v, nullptr, nullptr);
}

}  // namespace prlc

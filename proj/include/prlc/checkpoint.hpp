#pragma once

#include <string>

#include "prlc/mcmc.hpp"

namespace prlc {

// Binary chain checkpoints for bit-exact resumption.
//
// Layout (all little-endian):
//   magic "PRLC", u16 format version (1),
//   u8 group (0 = u1, 1 = su2), u8 mode (0 = torus, 1 = free), u8 joint,
//   u32 d, u32 half_width,
//   u64 sweep, u64 seed, u64 chain_id,
//   f64 edge_step, f64 higgs_step,
//   u64 n_edges, u64 n_sites,
//   f64 edge components (2 per edge for U(1), 4 for SU(2)),
//   f64 Higgs components when joint (2 or 4 per site).
// The RNG needs no serialized words beyond (seed, chain_id, sweep): streams
// are derived per sweep.

void save_checkpoint(const std::string& path, const JointChain<U1Model>& c);
void save_checkpoint(const std::string& path, const JointChain<SU2Model>& c);
void save_checkpoint(const std::string& path, const FixedChain<U1Model>& c);
void save_checkpoint(const std::string& path, const FixedChain<SU2Model>& c);

struct CheckpointInfo {
    GroupTag group;
    BoundaryMode mode;
    bool joint;
    int d;
    int half_width;
    long sweep;
};
CheckpointInfo peek_checkpoint(const std::string& path);

void load_checkpoint(const std::string& path, JointChain<U1Model>& c);
void load_checkpoint(const std::string& path, JointChain<SU2Model>& c);
void load_checkpoint(const std::string& path, FixedChain<U1Model>& c);
void load_checkpoint(const std::string& path, FixedChain<SU2Model>& c);

}  // namespace prlc

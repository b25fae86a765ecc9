#ifndef FNET_DATASET_HPP
#define FNET_DATASET_HPP

#include <cstdint>
#include <string>

#include "fnet/network.hpp"

namespace fnet {

enum class GenMode { sphere_uniform, sphere_separated, teacher };

const char* gen_mode_name(GenMode mode);
GenMode gen_mode_from_name(const std::string& name);

// Seeded dataset generators. All rows are unit norm.
//   sphere-uniform    rows uniform on the sphere, y uniform in [-1, 1]
//   sphere-separated  rejection-sampled until every pairwise angle is at
//                     least min_angle_deg (attempt cap 1e6), y as above
//   teacher           sphere-uniform rows labeled by a hidden width-
//                     `teacher_width` dense network, outputs clamped to
//                     [-1, 1]
// Sub-streams of `seed`: rows seed, labels seed+6, teacher net seed+5
// (offsets +1..+4 belong to network init).
Dataset gen_data(Index n, Index d, GenMode mode, std::uint64_t seed,
                 double min_angle_deg = 30.0, Index teacher_width = 32);

// CSV with header d0,...,d{d-1},y, floats at 17 significant digits. The
// writer also drops a binary cache at `<path>.cache` keyed by the CSV
// content hash; the reader uses it when the hash still matches and rebuilds
// it otherwise.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace fnet

#endif

// pxv/model_io.h

// Copyright 2026  The pxv Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// PXNM block files.
//
// Layout (little-endian):
//   "PXNM"  u32 version (=1)  u64 block count
//   per block: u32 name length, name bytes, u64 rows, u64 cols,
//              rows*cols f64 row-major
//
// Network parameters are stored as "<prefix>tdnn<k>.weight", ".bias"
// (1 x out) and ".offsets" (1 x |offsets|, the TDNN context as doubles);
// segment layers as "l/segment<k>.*" and "l/output.*"; senone heads as
// "<prefix>output.*". The prefix encodes the partition (see Partition).
// The network kind is implied by which prefixes are present.

#ifndef PXV_MODEL_IO_H_
#define PXV_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pxv/matrix.h"
#include "pxv/network.h"

namespace pxv {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct NamedBlock {
  std::string name;
  Matrix value;

  bool operator==(const NamedBlock&) const = default;
};

using BlockList = std::vector<NamedBlock>;

void write_blocks(const BlockList& blocks, std::ostream& os);
BlockList read_blocks(std::istream& is);
void write_blocks(const BlockList& blocks, const std::filesystem::path& path);
BlockList read_blocks(const std::filesystem::path& path);

/// Looks up `name`; throws DataError if absent.
const Matrix& find_block(const BlockList& blocks, const std::string& name);

BlockList to_blocks(const NetworkParams& net);
NetworkParams from_blocks(const BlockList& blocks);

void save_network(const NetworkParams& net, const std::filesystem::path& path);
NetworkParams load_network(const std::filesystem::path& path);

}  // namespace pxv

#endif  // PXV_MODEL_IO_H_

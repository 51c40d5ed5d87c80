#pragma once

#include <bit>
#include <cstring>
#include <string>
#include <vector>

#include "mcsim/types.hpp"

namespace mcsim {

enum class Layout { RowMajor, ColMajor, Array1D };

struct Region {
  std::string name;
  u64 base{0};   // absolute word address
  u64 words{0};  // extent
  Layout layout{Layout::Array1D};
  u64 rows{0}, cols{0};  // for matrix layouts
};

// Flat word-addressable external memory with named, disjoint regions.
// Words are raw 32-bit values; f32/u32 views are provided for the two
// payload types the kernels use.
class MemoryImage {
 public:
  // Regions are placed sequentially, aligned to `align` words.
  u32 add_region(const std::string& name, u64 words, Layout layout = Layout::Array1D,
                 u64 rows = 0, u64 cols = 0, u64 align = 16) {
    u64 base = ceil_div(next_, align) * align;
    regions_.push_back(Region{name, base, words, layout, rows, cols});
    next_ = base + words;
    data_.resize(next_, 0u);
    return static_cast<u32>(regions_.size() - 1);
  }

  const Region& region(u32 idx) const {
    if (idx >= regions_.size()) throw ProgramError("unknown region index " + std::to_string(idx));
    return regions_[idx];
  }
  u32 region_index(const std::string& name) const {
    for (u32 i = 0; i < regions_.size(); ++i)
      if (regions_[i].name == name) return i;
    throw ProgramError("unknown region: " + name);
  }
  std::size_t num_regions() const { return regions_.size(); }
  u64 total_words() const { return next_; }

  u32 raw(u64 addr) const { return data_[addr]; }
  void set_raw(u64 addr, u32 v) { data_[addr] = v; }

  float f32(u64 addr) const { return std::bit_cast<float>(data_[addr]); }
  void set_f32(u64 addr, float v) { data_[addr] = std::bit_cast<u32>(v); }

  u32 u32_at(u64 addr) const { return data_[addr]; }
  void set_u32(u64 addr, u32 v) { data_[addr] = v; }

  bool in_region(u32 region_idx, u64 offset, u64 count) const {
    const Region& r = region(region_idx);
    return offset + count <= r.words;
  }
  u64 abs_addr(u32 region_idx, u64 offset) const { return region(region_idx).base + offset; }

  // FNV-1a over a region's raw words; used for result fingerprints.
  u64 region_hash(u32 region_idx) const {
    const Region& r = region(region_idx);
    u64 h = 1469598103934665603ull;
    for (u64 i = 0; i < r.words; ++i) {
      h ^= data_[r.base + i];
      h *= 1099511628211ull;
    }
    return h;
  }

  bool region_equal(const MemoryImage& other, u32 region_idx) const {
    const Region& a = region(region_idx);
    const Region& b = other.region(region_idx);
    if (a.words != b.words) return false;
    return std::memcmp(data_.data() + a.base, other.data_.data() + b.base,
                       a.words * sizeof(u32)) == 0;
  }

 private:
  std::vector<u32> data_;
  std::vector<Region> regions_;
  u64 next_{0};
};

}  // namespace mcsim

#pragma once

// Frozen hand-built codebooks and scenarios shared by the unit and
// acceptance suites. Do not edit values: several tests pin expectations
// against them.

#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"

namespace corpus {

inline d2dlf::Codebook make(std::vector<double> bcb, std::vector<double> ddb,
                            std::vector<d2dlf::CellularCodeword> bcw,
                            std::vector<d2dlf::D2DCodeword> ddw) {
  d2dlf::Codebook cb;
  cb.bc_boundaries = std::move(bcb);
  cb.dd_boundaries = std::move(ddb);
  cb.bc_words = std::move(bcw);
  cb.dd_words = std::move(ddw);
  return cb;
}

// M=N=2
inline d2dlf::Codebook cb1() {
  return make({1.0}, {0.8}, {{1.0, 0.5}}, {{1.5}});
}

// M=2, N=3
inline d2dlf::Codebook cb2() {
  return make({0.7}, {0.5, 1.4}, {{1.2, 0.4}}, {{0.6}, {1.8}});
}

// M=N=3
inline d2dlf::Codebook cb3() {
  return make({0.5, 1.5}, {0.6, 1.8}, {{2.0, 0.3}, {1.0, 0.6}},
              {{0.5}, {2.0}});
}

// M=5, N=3
inline d2dlf::Codebook cb4() {
  return make({0.3, 0.8, 1.5, 2.5}, {0.5, 1.5},
              {{0.5, 0.1}, {1.0, 0.3}, {1.5, 0.6}, {2.0, 1.0}},
              {{1.0}, {2.0}});
}

// M=N=5
inline d2dlf::Codebook cb5() {
  return make({0.2, 0.6, 1.2, 2.2}, {0.3, 0.9, 1.6, 2.8},
              {{0.4, 0.05}, {0.8, 0.2}, {1.3, 0.5}, {1.9, 0.9}},
              {{0.4}, {0.9}, {1.6}, {2.5}});
}

inline std::vector<d2dlf::Codebook> codebooks() {
  return {cb1(), cb2(), cb3(), cb4(), cb5()};
}

inline d2dlf::ChannelStats scenario1() { return {}; }  // all unit means

inline d2dlf::ChannelStats scenario2() {
  return {1.5, 0.8, 2.0, 0.6, 0.7, 0.9};
}

inline d2dlf::ChannelStats scenario3() {
  return {0.5, 1.2, 1.0, 1.5, 0.3, 2.0};
}

inline std::vector<d2dlf::ChannelStats> scenarios() {
  return {scenario1(), scenario2(), scenario3()};
}

}  // namespace corpus

#pragma once

#include <iosfwd>
#include <string>

#include "bsaomp/channel_model.hpp"
#include "bsaomp/sounding.hpp"

namespace bsaomp {

// Line-oriented text fixtures. Every real is written with 17 significant
// digits so a write/read cycle is exact; complex values are "re im" pairs and
// matrices are listed row by row.
//
//   bsaomp-pathset 1
//   users <K>
//   user <k> paths <L>
//   path <doa> <dod> <gain.re> <gain.im> <delay_s> <doa_index> <dod_index>
//
//   bsaomp-channel 1
//   subcarriers <M> rows <R> cols <C>
//   subcarrier <m>
//   <re> <im> ... (C pairs per row, R rows)
//
//   bsaomp-measurements 1
//   snr_db <snr> noise_variance <s2> subcarriers <M> length <n>
//   subcarrier <m>
//   <re> <im>   (n lines)

void write_path_set(std::ostream& os, const PathSet& paths);
PathSet read_path_set(std::istream& is);

void write_channel(std::ostream& os, const WidebandChannel& channel);
WidebandChannel read_channel(std::istream& is);

void write_measurements(std::ostream& os, const MeasurementBundle& bundle);
MeasurementBundle read_measurements(std::istream& is);

}  // namespace bsaomp

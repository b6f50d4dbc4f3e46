#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "idasnet/pipeline/ber.hpp"
#include "idasnet/pipeline/train.hpp"

namespace idasnet::pipeline {

/// Shortest decimal form that parses back to the same double.
std::string round_trip(double v);

/// epoch,loss,lr
std::string loss_csv(const std::vector<EpochStats>& history);
/// snr_db,ber,count,errors,oracle,std_error (count = transmitted bits)
std::string ber_csv(const BerCurve& curve);

/// Writes `text` to `path` through a temp file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace idasnet::pipeline

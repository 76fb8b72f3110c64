#pragma once

#include <filesystem>
#include <string_view>

#include "ccts/core/dataset.hpp"

namespace ccts {

enum class DatasetFormat { kCsvLong, kJsonl };

DatasetFormat format_from_string(std::string_view s);  // "csv-long" | "jsonl"
// ".csv" -> csv-long, anything else -> jsonl.
DatasetFormat format_from_path(const std::filesystem::path& path);

// csv-long: header `sample_id,label,split,channel,timestep,value[,concept]`,
// one row per (channel, timestep); `channel` holds the channel name. Sample
// order follows first appearance. Without a concept column every position
// gets concept 1. With one, C is the largest label in the file and masks
// whose rows agree across channels load in channel-agnostic form.
//
// jsonl: one object per line with keys sample_id, label, split, values
// ([channel][timestep]), mask ([timestep] or [channel][timestep]),
// n_concepts, and optional channel_names and dt.
//
// Throws ParseError (with line number) on malformed input and
// ShapeError/DataError naming the offending sample_id.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset load_dataset(const std::filesystem::path& path);

// Values are written with 17 significant digits so that loading reproduces
// them exactly. Throws IoError.
void save_dataset(const Dataset& d, const std::filesystem::path& path,
                  DatasetFormat format);
void save_dataset(const Dataset& d, const std::filesystem::path& path);

// Shortest-exact decimal form used by every text writer in the project.
std::string format_double(double v);

}  // namespace ccts

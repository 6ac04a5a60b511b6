#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dhira {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

// Fixed-point with `decimals` fractional digits (report serialization only).
std::string format_fixed(double v, int decimals);

// Whole file as a string. Throws DataError if unreadable.
std::string read_file(const std::string& path);

// Writes content atomically enough for our purposes (truncate + write).
// Throws DataError if the destination is unwritable.
void write_file(const std::string& path, std::string_view content);

// Splits one CSV record on commas. No quoting support; our formats never
// emit commas inside fields except the final quoted-free contribution column,
// which uses ';' as its internal separator.
std::vector<std::string> split_csv_line(std::string_view line);

std::vector<std::string> split(std::string_view text, char sep);

std::string_view trim(std::string_view s);

// Runs fn(i) for i in [0, n) over at most `threads` workers. Thread count is
// clamped by the DHIRA_THREADS environment variable when set. Work items must
// be independent; results must not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Effective parallelism bound (hardware_concurrency capped by DHIRA_THREADS).
unsigned effective_threads();

}  // namespace dhira

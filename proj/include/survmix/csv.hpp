#pragma once

#include <iosfwd>
#include <string>

#include "survmix/data.hpp"

namespace survmix {

// Reads the dataset CSV `time,event[,arm][,component_truth]`. The header
// row is row 1 in error messages. Times must be positive decimals, event
// and arm in {0,1}, truth a component index >= 1.
// Errors: unreadable file or wrong header -> format_error; an empty file or
// a bad value (with its row number) -> data_error.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

// Writes the same schema; the arm column appears when every row has one,
// the truth column when the dataset carries it and with_truth is set.
// Times are written with 10 significant digits, which round-trips the
// values read_csv accepts.
void write_csv(std::ostream& out, const Dataset& data,
               bool with_truth = false);

// "%.10g" formatting used for every number the CLI emits.
std::string format_number(double x);

}  // namespace survmix

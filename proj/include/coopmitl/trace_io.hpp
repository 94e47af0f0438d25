#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "coopmitl/executive.hpp"
#include "coopmitl/planner.hpp"

namespace coopmitl::io {

/// Plan JSON ("coopmitl-plan v1").
std::string plan_to_json(const plan::Plan& plan, const std::string& formula);
plan::Plan plan_from_json(const std::string& text);
void write_plan(const std::filesystem::path& path, const plan::Plan& plan,
                const std::string& formula);
plan::Plan read_plan(const std::filesystem::path& path);

/// Trace CSV ("# coopmitl-trace v1" header line, then a column header row).
void write_trace(std::ostream& out, const exec::ExecutionTrace& trace);
exec::ExecutionTrace read_trace(std::istream& in);
void write_trace(const std::filesystem::path& path, const exec::ExecutionTrace& trace);
exec::ExecutionTrace read_trace(const std::filesystem::path& path);

/// Report JSON ("coopmitl-report v1").
std::string report_to_json(const exec::Report& report);
void write_report(const std::filesystem::path& path, const exec::Report& report);

}  // namespace coopmitl::io

#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace esgport {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws DomainError.
Date parse_date(std::string_view text);
std::string format_date(Date d);

bool is_weekday(Date d);

/// Monday-to-Friday dates in [first, last].
std::vector<Date> business_days(Date first, Date last);

}  // namespace esgport

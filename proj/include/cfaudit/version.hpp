#pragma once

namespace cfaudit {

inline constexpr const char* kToolVersion = "0.1.0";

// Format tags embedded in every serialized artifact. Bump the suffix when a
// format changes incompatibly.
inline constexpr const char* kSchemaFormat = "cfaudit.schema/1";
inline constexpr const char* kModelFormat = "cfaudit.model/1";
inline constexpr const char* kSpaceFormat = "cfaudit.space/1";
inline constexpr const char* kStatementFormat = "cfaudit.statement/1";
inline constexpr const char* kReportedFormat = "cfaudit.reported/1";
inline constexpr const char* kAuditFormat = "cfaudit.audit/1";
inline constexpr const char* kSweepFormat = "cfaudit.sweep/1";
inline constexpr const char* kConfigFormat = "cfaudit.config/1";

}  // namespace cfaudit

#include "codevoice/blob_store.hpp"
#include "codevoice/request_log.hpp"
#include "codevoice/task_state.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "temp_dir.hpp"

using namespace codevoice;
using namespace codevoice::pipeline;

namespace {

RequestLogEntry entry(const std::string& id, TaskState state = TaskState::Succeeded) {
  RequestLogEntry e;
  e.task_id = id;
  e.created_at = "2026-01-02T03:04:05.678Z";
  e.language = LanguageTag::Tamil;
  e.state = state;
  e.durations_ms = {{"TRANSCRIBING", 3}, {"GENERATING", 12}};
  e.raw_transcript = "some of array";
  e.refined_transcript = "sum of array";
  if (state == TaskState::Succeeded) e.response_text = "answer";
  return e;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(TaskState, LegalTransitions) {
  EXPECT_TRUE(is_legal_transition(TaskState::Queued, TaskState::Transcribing));
  EXPECT_TRUE(is_legal_transition(TaskState::Transcribing, TaskState::Refining));
  EXPECT_TRUE(is_legal_transition(TaskState::Refining, TaskState::Generating));
  EXPECT_TRUE(is_legal_transition(TaskState::Generating, TaskState::Synthesizing));
  EXPECT_TRUE(is_legal_transition(TaskState::Generating, TaskState::Succeeded));
  EXPECT_TRUE(is_legal_transition(TaskState::Synthesizing, TaskState::Succeeded));
  for (const auto s : {TaskState::Queued, TaskState::Transcribing, TaskState::Refining, TaskState::Generating,
                       TaskState::Synthesizing}) {
    EXPECT_TRUE(is_legal_transition(s, TaskState::Failed));
    EXPECT_FALSE(is_terminal(s));
  }
  EXPECT_FALSE(is_legal_transition(TaskState::Queued, TaskState::Refining));
  EXPECT_FALSE(is_legal_transition(TaskState::Succeeded, TaskState::Failed));
  EXPECT_FALSE(is_legal_transition(TaskState::Failed, TaskState::Queued));
  EXPECT_FALSE(is_legal_transition(TaskState::Refining, TaskState::Succeeded));
  EXPECT_TRUE(is_terminal(TaskState::Succeeded));
  EXPECT_TRUE(is_terminal(TaskState::Failed));
  EXPECT_EQ(parse_task_state("SYNTHESIZING"), TaskState::Synthesizing);
  EXPECT_EQ(to_string(TaskState::Queued), "QUEUED");
}

TEST(BlobStore, ContentAddressedLayout) {
  support::TempDir dir;
  BlobStore store(dir.path() / "blobs");
  const auto hex = store.put("hello", "audio/wav");
  EXPECT_EQ(hex, "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
  EXPECT_EQ(store.path_for(hex), dir.path() / "blobs" / "2c" / hex);
  EXPECT_EQ(slurp(store.path_for(hex)), "hello");
  EXPECT_EQ(slurp(dir.path() / "blobs" / "2c" / (hex + ".mime")), "audio/wav");
  const auto blob = store.get(hex);
  ASSERT_TRUE(blob.has_value());
  EXPECT_EQ(blob->bytes, "hello");
  EXPECT_EQ(blob->media_type, "audio/wav");
  EXPECT_EQ(store.put("hello", "audio/wav"), hex);
  EXPECT_FALSE(store.get(std::string(64, '0')).has_value());
  EXPECT_FALSE(store.get("../../etc/passwd").has_value());
}

TEST(RequestLog, JsonRoundTrip) {
  const auto e = entry("t1");
  EXPECT_EQ(entry_from_json(to_json(e)), e);
  EXPECT_THROW(entry_from_json(nlohmann::json{{"task_id", "x"}}), std::invalid_argument);
}

TEST(RequestLog, AppendReloadAndRecent) {
  support::TempDir dir;
  const auto file = dir.path() / "requests.log";
  {
    RequestLog log(file);
    EXPECT_TRUE(log.recent(5).empty());
    log.append(entry("t1"));
    log.append(entry("t2", TaskState::Failed));
    log.append(entry("t3"));
    const auto two = log.recent(2);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0].task_id, "t3");
    EXPECT_EQ(two[1].task_id, "t2");
    EXPECT_THROW(log.recent(0), std::invalid_argument);
  }
  const auto text = slurp(file);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  RequestLog again(file);
  EXPECT_EQ(again.size(), 3u);
  EXPECT_EQ(again.discarded_on_load(), 0u);
  ASSERT_TRUE(again.find("t2").has_value());
  EXPECT_EQ(*again.find("t2"), entry("t2", TaskState::Failed));
}

TEST(RequestLog, TornTailIsRepaired) {
  support::TempDir dir;
  const auto file = dir.path() / "requests.log";
  {
    RequestLog log(file);
    log.append(entry("t1"));
    log.append(entry("t2"));
  }
  {
    std::ofstream out(file, std::ios::app | std::ios::binary);
    out << R"({"task_id":"t3","created_at":"2026-)";
  }
  {
    RequestLog log(file);
    EXPECT_EQ(log.size(), 2u);
    EXPECT_EQ(log.discarded_on_load(), 1u);
    log.append(entry("t4"));
  }
  RequestLog reread(file);
  EXPECT_EQ(reread.size(), 3u);
  EXPECT_EQ(reread.discarded_on_load(), 0u);
  EXPECT_EQ(reread.recent(1)[0].task_id, "t4");
}

TEST(RequestLog, CorruptLineSkipped) {
  support::TempDir dir;
  const auto file = dir.path() / "requests.log";
  {
    RequestLog log(file);
    log.append(entry("t1"));
  }
  {
    std::ofstream out(file, std::ios::app | std::ios::binary);
    out << "garbage\n";
  }
  RequestLog log(file);
  EXPECT_EQ(log.size(), 1u);
  EXPECT_EQ(log.discarded_on_load(), 1u);
}

#include "curate/sdg/prompts.hpp"

#include "curate/core/error.hpp"

namespace curate {

namespace {

constexpr std::string_view kWikipediaTemplate = R"prompt(For the following paragraph give me a diverse paraphrase of the same in high quality English language as in sentences on Wikipedia. Begin your answer on a separate line with "Here is a paraphrased version:".

Text: [DOCUMENT SEGMENT])prompt";

constexpr std::string_view kDiverseQATemplate = R"prompt(Task: Read the text, ask questions and answer them.

Follow these instructions:
1. Ask diverse questions that require different cognitive skills or cover different aspects of the text.
2. Ask questions in various forms such as:
  - Yes/No questions that require determining whether a statement is true or false.
  - Open-ended questions that begin with words like what, how, when, where, why and who.
  - Multi-choice questions that offers two or more options to choose from. Include the options in the question.
  - Comparison questions that compare two quantities or objects and determine the relationship between them.
  - Reading comprehension questions that test the ability to understand and analyze the text.
  - Problem-solving questions that test the ability to solve mathematical, physical, or logical problems.
3. Focus on asking questions about factual information, important knowledge, or concrete details in the text.
4. Write questions and answers using clear and concise language.
5. Use plain text. Do not use Markdown.
6. Each question and answer pair should be on a separate line. Tag the question with "Question:" and the answer with "Answer:".

Text:
[DOCUMENT SEGMENT]

Task:
After reading the above text, ask up to 8 questions and provide the correct answers following the instructions. Give your response in this format:

Here are the questions and answers based on the provided text:
- Question: [first question] Answer: [first answer]
- Question: [second question] Answer: [second answer]
....)prompt";

constexpr std::string_view kDistillTemplate = R"prompt(Your task is to read and paraphrase the provided text following these instructions:
- Aim to create a condensed but accurate and informative version of the original text, not a simplistic summary.
- Capture and preserve the crucial information, key concepts, important values, and factual details in the original text, while making it more readable and accessible.
- Retain technical terms, specialized vocabulary, and complex concepts.
- Retain examples, explanations of reasoning processes, and supporting evidence to maintain the text's depth and context.
- Only include information that is present in the original text. Do not adding new or unsubstantiated claims.
- Write in plain text.

Here is the text:
[DOCUMENT SEGMENT]

Task:
After thoroughly reading the above text, paraphrase it in high-quality and clear English following the instructions.)prompt";

constexpr std::string_view kExtractKnowledgeTemplate = R"prompt(Your task is to rewrite knowledge from the provided text following these instructions:
- Rewrite the text as a passage or passages using easy-to-understand and high-quality English like sentences in textbooks and Wikipedia.
- Focus on content in disciplines such as humanities, social sciences, natural sciences, technology, engineering, math, law and legal, business, management, art, education, agricultural sciences, politics, and history.
- Disregard content that does not contain useful facts or knowledge.
- Retain examples, explanations of reasoning processes, and supporting evidence to maintain the text's depth and context.
- Do not add or alter details. Only restate what is already in the text.
- Write in plain text.
- Do not add titles, subtitles, note, or comment.

Text:
[DOCUMENT SEGMENT]

Task:
Rewrite facts and knowledge from the above text as a passage or passages following the instructions.)prompt";

constexpr std::string_view kKnowledgeListTemplate = R"prompt(Review the text and extract the key information. Follow these instructions:
- Carefully read the above text and provide a concise and organized list of factual information, concrete details, key concepts, and important numbers and statistics extracted from the text.
- Ensure each point is clear, specific, and supported by the original text.
- Ensure the extract text is information-dense and easier to learn from.
- Do not add titles or headings.

Text:
[DOCUMENT SEGMENT]

Task:
Extract the factual information, concrete details, and key concepts from the above text following the instructions.)prompt";

}  // namespace

std::string_view prompt_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::Wikipedia: return kWikipediaTemplate;
    case PromptKind::DiverseQA: return kDiverseQATemplate;
    case PromptKind::Distill: return kDistillTemplate;
    case PromptKind::ExtractKnowledge: return kExtractKnowledgeTemplate;
    case PromptKind::KnowledgeList: return kKnowledgeListTemplate;
  }
  throw Error("invalid prompt kind");
}

std::size_t token_limit(PromptKind kind) {
  switch (kind) {
    case PromptKind::Wikipedia: return 512;
    case PromptKind::Distill: return 2000;
    case PromptKind::ExtractKnowledge: return 1400;
    case PromptKind::DiverseQA: return 1000;
    case PromptKind::KnowledgeList: return 1000;
  }
  throw Error("invalid prompt kind");
}

std::string render_prompt_text(PromptKind kind, std::string_view segment) {
  const auto tmpl = prompt_template(kind);
  const auto at = tmpl.find(kSegmentPlaceholder);
  std::string out;
  out.reserve(tmpl.size() + segment.size());
  out.append(tmpl.substr(0, at));
  out.append(segment);
  out.append(tmpl.substr(at + kSegmentPlaceholder.size()));
  return out;
}

std::vector<ChatMessage> render_prompt(PromptKind kind, std::string_view segment) {
  if (segment.empty()) throw Error("cannot render a prompt for an empty segment");
  return {ChatMessage{"user", render_prompt_text(kind, segment)}};
}

std::size_t prompt_overhead(PromptKind kind, const TokenCounter& counter) {
  return counter.count(render_prompt_text(kind, "")) + kChatFormatTokens;
}

std::optional<PromptKind> detect_prompt_kind(std::string_view prompt) {
  for (auto kind : kAllPromptKinds) {
    const auto tmpl = prompt_template(kind);
    const auto at = tmpl.find(kSegmentPlaceholder);
    const auto head = tmpl.substr(0, at);
    const auto tail = tmpl.substr(at + kSegmentPlaceholder.size());
    if (prompt.size() >= head.size() + tail.size() && prompt.starts_with(head) && prompt.ends_with(tail)) return kind;
  }
  return std::nullopt;
}

std::optional<std::string> extract_segment(std::string_view prompt) {
  const auto kind = detect_prompt_kind(prompt);
  if (!kind) return std::nullopt;
  const auto tmpl = prompt_template(*kind);
  const auto at = tmpl.find(kSegmentPlaceholder);
  const auto tail = tmpl.size() - at - kSegmentPlaceholder.size();
  return std::string(prompt.substr(at, prompt.size() - at - tail));
}

}  // namespace curate

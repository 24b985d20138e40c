#include "sentiflow/prompt.hpp"

#include <fstream>

#include <nlohmann/json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "sentiflow/normalize.hpp"

namespace sentiflow {
namespace {

constexpr std::string_view kPreamble =
    "You are a bot designed to judge Chinese sentences as having positive, negative, or neutral "
    "sentiment. I'm going to provide posts from Chinese social media. **IMPORTANT: You must only "
    "answer with \"positive,\" \"negative,\" \"sarcastic,\" or \"neutral.\" Do not explain your "
    "response or include other text.**\n"
    "\n"
    "Use the following criteria for your judgment:\n"
    "\n"
    "1. If the post speaks well of a figure or event that is commonly regarded as a good figure or "
    "event, with no unnecessary exaggeration, it is 'positive' sentiment.\n"
    "\n"
    "2. If the post disparages a figure or event commonly regarded as a wrong figure or event, "
    "then it is a 'negative' sentiment.\n"
    "\n"
    "3. If the post does not use emotional language and consists of matter-of-fact reporting of "
    "factual statements, it corresponds to a 'neutral' sentiment.\n"
    "\n"
    "4. Sarcasm in the post, which appears with exaggerated emotion, pretend naivete, or other "
    "common sarcastic tone indicators, should correspond to a 'sarcastic' sentiment.\n"
    "\n"
    "IMPORTANT: Some posts may be appended with the original post that the user replied to. They "
    "use the format: [reply]//[original post]. You must predict the sentiment of the reply only, "
    "but you may use the original post as context to understand the reply.\n";

constexpr std::string_view kExamplesHeader = "\nHere are some examples:\n";
constexpr std::string_view kClosing = "\nNow we begin. Classify:";

std::vector<FewShotExample> make_defaults() {
  return {
      {"#关注新型肺炎#【国家监委派出调查组，全面调查涉及李文亮医生有关问题】经中央批准，国家监察 "
       "委员会决定派出调查组赴湖北省武汉市，就群众反映的涉及李文亮医生的有关问题作全面调查。"
       "O国家监委派出调查组，全面调查涉及李文亮医生有关问题",
       SentimentLabel::Neutral},
      {"妈妈 我已经快二十天没喝奶茶 没有大吃大喝了 求求你赶紧疫情结束 我人都快没了 "
       "我想上课我想喝奶茶我想吃烧烤",
       SentimentLabel::Negative},
      {"高中时就暗恋他已久，高三毕业那天我鼓起勇气表白，万万没想到他居然也默默喜欢着我，填志愿时 "
       "也选择了同一个城市。后来工作了异地了四年，晃眼我们走过了十年呢，19年时我们步入了婚姻礼堂。"
       "我想 这世上最幸福的事情之一 那就是两个人都互相深爱并且坚持吧~疫情过后 "
       "春暖花开，我们想去武大看樱花。",
       SentimentLabel::Positive},
      {"就你们敢说实话，//@7362410961:世卫组织说目前只有瑞德西韦可能有效，中科院双黄连有效，南京 "
       "大学说金银花有效，北京大学沐舒坦有效，南开大学说姜、大枣、龙眼肉都能预防。中国人民真幸福，"
       "这么 多常见药物、食品可以抗新型冠状病毒，还慌什么呢？",
       SentimentLabel::Sarcastic},
      {"无言//因为疫情我猛然发现不管是新闻里还是现实生活中，从大官到小官，究竟还有多少智力缺陷人 "
       "士，干出来的事每天都让老百姓瞠目结舌",
       SentimentLabel::Negative},
  };
}

bool is_quote(UChar32 cp) {
  switch (cp) {
    case '"':
    case '\'':
    case '`':
    case 0x2018:  // ‘
    case 0x2019:  // ’
    case 0x201C:  // “
    case 0x201D:  // ”
    case 0x300C:  // 「
    case 0x300D:  // 」
    case 0x300E:  // 『
    case 0x300F:  // 』
    case 0xFF02:  // ＂
    case 0xFF07:  // ＇
      return true;
    default:
      return false;
  }
}

bool is_terminal_punct(UChar32 cp) {
  switch (cp) {
    case '.':
    case ',':
    case '!':
    case '?':
    case ';':
    case ':':
    case 0x3002:  // 。
    case 0xFF0C:  // ，
    case 0xFF01:  // ！
    case 0xFF1F:  // ？
    case 0xFF1B:  // ；
    case 0xFF1A:  // ：
    case 0x2026:  // …
      return true;
    default:
      return false;
  }
}

bool is_decoration(UChar32 cp) { return u_isUWhiteSpace(cp) || is_quote(cp) || is_terminal_punct(cp); }

}  // namespace

const std::vector<FewShotExample>& default_examples() {
  static const std::vector<FewShotExample> examples = make_defaults();
  return examples;
}

PromptBundle build_prompt(std::string_view post, const std::vector<FewShotExample>& examples) {
  if (trim_unicode(post).empty()) throw EmptyPostError();
  PromptBundle bundle;
  std::string& text = bundle.system_instructions;
  text.append(kPreamble);
  if (!examples.empty()) {
    text.append(kExamplesHeader);
    for (const auto& ex : examples) {
      text.append("\nPost: ").append(ex.post_text).append("\n");
      text.append("Expected Answer: ").append(display_name(ex.expected)).append("\n");
    }
  }
  text.append(kClosing);
  bundle.examples = examples;
  bundle.query_post = std::string(post);
  return bundle;
}

LabelOutcome parse_label(std::string_view raw) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  auto length = static_cast<int32_t>(raw.size());
  int32_t begin = 0;
  int32_t end = length;
  while (begin < end) {
    int32_t next = begin;
    UChar32 cp;
    U8_NEXT(bytes, next, end, cp);
    if (cp < 0 || !is_decoration(cp)) break;
    begin = next;
  }
  while (end > begin) {
    int32_t prev = end;
    UChar32 cp;
    U8_PREV(bytes, begin, prev, cp);
    if (cp < 0 || !is_decoration(cp)) break;
    end = prev;
  }
  std::string word(raw.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin)));
  for (char& c : word) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return label_from_word(word);
}

std::vector<FewShotExample> load_examples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open example file: " + path.string());
  std::vector<FewShotExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_unicode(line).empty()) continue;
    auto where = path.string() + ":" + std::to_string(line_no);
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError(where + ": not a JSON object");
    auto post = doc.find("post");
    auto label = doc.find("label");
    if (post == doc.end() || !post->is_string() || label == doc.end() || !label->is_string()) {
      throw ConfigError(where + ": expected string fields \"post\" and \"label\"");
    }
    auto parsed = parse_label(label->get<std::string>());
    if (!parsed) throw ConfigError(where + ": unknown label " + label->dump());
    if (trim_unicode(post->get_ref<const std::string&>()).empty()) {
      throw ConfigError(where + ": empty post text");
    }
    out.push_back({post->get<std::string>(), *parsed});
  }
  return out;
}

}  // namespace sentiflow

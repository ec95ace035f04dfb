#pragma once

// Builtin tagger data, version 1. Changing any line changes tag streams and
// therefore every golden file derived from them: bump the version instead.
//
// Format, one directive per line ('#' starts a comment):
//   version <n>
//   word <lowercase form> <TAG>            closed-class lexicon entry
//   rule <kind> [arg] <TAG> [min=N] [prev=T1,T2,...]
//        kinds: number | symbol | capitalized | hyphenated | suffix <s>
//        rules apply in file order to words missing from the lexicon;
//        the first match wins. min is a length in code points, prev
//        restricts the rule to a given tag on the preceding token.
//   default <TAG>

#include <string_view>

namespace textdiv::data {

inline constexpr std::string_view kBuiltinLexiconV1 = R"LEX(
version 1

# punctuation
word . .
word ! .
word ? .
word , ,
word : :
word ; :
word - :
word -- :
word – :
word — :
word … :
word ( (
word [ (
word { (
word ) )
word ] )
word } )
word " ''
word ' ''
word ” ''
word ’ ''
word “ ``
word ‘ ``
word ` ``
word $ $
word £ $
word € $
word # #

# determiners
word the DT
word a DT
word an DT
word this DT
word that DT
word these DT
word those DT
word every DT
word each DT
word some DT
word any DT
word no DT
word another DT
word either DT
word neither DT
word all PDT
word both PDT
word half PDT

# coordinating conjunctions
word and CC
word or CC
word but CC
word nor CC
word plus CC

# prepositions and subordinating conjunctions
word of IN
word in IN
word on IN
word at IN
word by IN
word for IN
word with IN
word from IN
word about IN
word as IN
word into IN
word like IN
word through IN
word after IN
word over IN
word between IN
word against IN
word during IN
word without IN
word before IN
word under IN
word around IN
word among IN
word since IN
word until IN
word upon IN
word within IN
word across IN
word behind IN
word beyond IN
word near IN
word toward IN
word towards IN
word than IN
word because IN
word if IN
word while IN
word although IN
word though IN
word whether IN
word unless IN
word per IN
word via IN
word despite IN
word onto IN
word outside IN
word inside IN
word above IN
word below IN
word beside IN
word along IN

word to TO
word there EX

# pronouns
word i PRP
word you PRP
word he PRP
word she PRP
word it PRP
word we PRP
word they PRP
word me PRP
word him PRP
word us PRP
word them PRP
word myself PRP
word yourself PRP
word himself PRP
word herself PRP
word itself PRP
word ourselves PRP
word themselves PRP
word my PRP$
word your PRP$
word his PRP$
word her PRP$
word its PRP$
word our PRP$
word their PRP$
word which WDT
word who WP
word whom WP
word what WP
word whose WP$
word when WRB
word where WRB
word why WRB
word how WRB

# modals and auxiliaries
word can MD
word could MD
word will MD
word would MD
word shall MD
word should MD
word may MD
word might MD
word must MD
word is VBZ
word are VBP
word am VBP
word was VBD
word were VBD
word be VB
word been VBN
word being VBG
word has VBZ
word have VBP
word had VBD
word do VBP
word does VBZ
word did VBD
word done VBN
word get VB
word got VBD
word make VB
word made VBD
word said VBD
word says VBZ
word say VBP
word go VB
word went VBD
word gone VBN
word take VB
word took VBD
word taken VBN
word see VB
word saw VBD
word seen VBN
word know VBP
word knew VBD
word known VBN
word think VBP
word thought VBD
word come VB
word came VBD
word give VB
word gave VBD
word given VBN
word find VB
word found VBD
word tell VB
word told VBD
word become VB
word became VBD
word leave VB
word left VBD
word feel VBP
word felt VBD
word keep VB
word kept VBD
word begin VB
word began VBD
word bring VB
word brought VBD
word write VB
word wrote VBD
word written VBN
word enjoy VBP
word want VBP
word need VBP
word use VB
word help VB
word let VB

# contractions
word don't VBP
word doesn't VBZ
word didn't VBD
word isn't VBZ
word aren't VBP
word wasn't VBD
word weren't VBD
word can't MD
word cannot MD
word won't MD
word wouldn't MD
word couldn't MD
word shouldn't MD
word hasn't VBZ
word haven't VBP
word hadn't VBD
word it's PRP
word that's DT
word there's EX
word he's PRP
word she's PRP
word what's WP
word let's VB
word i'm PRP
word you're PRP
word we're PRP
word they're PRP
word i've PRP
word you've PRP
word we've PRP
word they've PRP
word i'll PRP
word you'll PRP
word we'll PRP
word they'll PRP
word i'd PRP
word 's POS

# adverbs and particles
word not RB
word n't RB
word very RB
word also RB
word just RB
word too RB
word only RB
word then RB
word now RB
word here RB
word never RB
word always RB
word often RB
word still RB
word even RB
word again RB
word already RB
word soon RB
word however RB
word perhaps RB
word quite RB
word rather RB
word almost RB
word so RB
word well RB
word more RBR
word less RBR
word most RBS
word least RBS
word up RP
word out RP
word off RP
word down RP
word away RP

# frequent adjectives
word good JJ
word new JJ
word first JJ
word last JJ
word long JJ
word great JJ
word little JJ
word own JJ
word other JJ
word old JJ
word right JJ
word big JJ
word high JJ
word small JJ
word large JJ
word next JJ
word early JJ
word young JJ
word few JJ
word bad JJ
word same JJ
word able JJ
word cute JJ
word sunny JJ
word many JJ
word much JJ
word such JJ
word better JJR
word worse JJR
word best JJS
word worst JJS

# numbers and interjections
word one CD
word two CD
word three CD
word four CD
word five CD
word six CD
word seven CD
word eight CD
word nine CD
word ten CD
word hundred CD
word thousand CD
word million CD
word billion CD
word oh UH
word yes UH
word hello UH
word wow UH
word ok UH
word okay UH
word please UH

# open-class rules
rule number CD
rule symbol SYM
rule capitalized NNP
rule hyphenated JJ
rule suffix ing VBG min=5
rule suffix ed VBN min=4 prev=VB,VBD,VBN,VBP,VBZ
rule suffix ed VBD min=4
rule suffix ly RB min=4
rule suffix ness NN min=6
rule suffix ment NN min=6
rule suffix tion NN min=6
rule suffix sion NN min=6
rule suffix ity NN min=5
rule suffix ism NN min=5
rule suffix ous JJ min=5
rule suffix ful JJ min=5
rule suffix ive JJ min=5
rule suffix able JJ min=6
rule suffix ible JJ min=6
rule suffix less JJ min=6
rule suffix ical JJ min=6
rule suffix ish JJ min=5
rule suffix ize VB min=5
rule suffix ise VB min=5
rule suffix ss NN min=3
rule suffix us NN min=3
rule suffix is NN min=3
rule suffix 's NN min=3
rule suffix s VBZ min=3 prev=NN,NNP,PRP,WDT,WP
rule suffix s NNS min=3
default NN
)LEX";

}  // namespace textdiv::data

use crate::model::Lang;

const FULLWIDTH_OFFSET: u32 = 0xFEE0;

fn is_fullwidth_alnum(c: char) -> bool {
    matches!(c, '\u{FF10}'..='\u{FF19}' | '\u{FF21}'..='\u{FF3A}' | '\u{FF41}'..='\u{FF5A}')
}

fn to_halfwidth(c: char) -> char {
    char::from_u32(c as u32 - FULLWIDTH_OFFSET).unwrap_or(c)
}

/// Maps one character, `None` meaning delete.
fn map_char(c: char, lang: Lang) -> Option<char> {
    let mapped = match c {
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{2033}' | '\u{00AB}' | '\u{00BB}' => '"',
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' | '\u{2032}' => '\'',
        // hyphen, non-breaking hyphen, figure dash, hyphen bullet, minus sign
        '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2043}' | '\u{2212}' => '-',
        // horizontal bar and presentation-form dashes collapse to the em dash
        '\u{2015}' | '\u{FE58}' | '\u{FE31}' | '\u{2E3A}' => '\u{2014}',
        '\u{FE63}' => '-',
        '\t' | '\u{00A0}' | '\u{2007}' | '\u{202F}' | '\u{2009}' | '\u{200A}' | '\u{2002}' | '\u{2003}' => ' ',
        '\u{200B}' | '\u{200C}' | '\u{200D}' | '\u{2060}' | '\u{FEFF}' => return None,
        c if is_fullwidth_alnum(c) => to_halfwidth(c),
        '\u{FF02}' => '"',
        '\u{FF07}' => '\'',
        '\u{FF0D}' => '-',
        c if lang == Lang::En && ('\u{FF01}'..='\u{FF5E}').contains(&c) => to_halfwidth(c),
        '\u{3000}' if lang == Lang::En => ' ',
        c => c,
    };
    Some(mapped)
}

/// Standardizes quotes, dashes, spaces and full-width characters.
///
/// Full-width letters and digits become ASCII in both languages. English
/// text also loses full-width punctuation and the ideographic space, while
/// Chinese keeps its own punctuation (`。！？，` and friends). The mapping
/// only produces characters it leaves untouched, so it is idempotent.
pub fn normalize_text(text: &str, lang: Lang) -> String {
    text.chars().filter_map(|c| map_char(c, lang)).collect()
}

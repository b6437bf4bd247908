/// First status word on a line shaped `% SZS status Word` or `# SZS status Word`.
pub fn parse_szs(output: &str) -> Option<&str> {
    output.lines().find_map(|line| {
        let rest = line.trim_start().strip_prefix(['%', '#'])?;
        let mut words = rest.split_whitespace();
        (words.next()? == "SZS" && words.next()? == "status").then_some(())?;
        words.next()
    })
}

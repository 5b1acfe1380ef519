method Seconds(h: int, m: int) returns (s: int)
  ensures s == h * 3600 + m * 60
{
  return (h * 60 + m) * 60;
}

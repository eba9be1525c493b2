#!/usr/bin/env python3
"""Writes the illustrative fixture benchmark and curation inputs under fixtures/.

The rows are small hand-entered samples for exercising the harness, not an
authoritative copy of any source table.
"""
import csv
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def col(name, key=False, numeric=False):
    return {"name": name, "is_key": key, "is_numeric": numeric}


def inst(id_, description, columns, rows, popularity, page, split="eval"):
    return {
        "id": id_,
        "description": description,
        "split": split,
        "popularity": popularity,
        "source_page": page,
        "columns": columns,
        "rows": rows,
    }


def benchmark():
    out = []
    out.append(inst(
        "susen_tiedtke",
        "achievements of Susen Tiedtke from 1987 to 2000",
        [col("year", True, True), col("competition", True), col("venue"), col("position")],
        [
            ["1987", "European Junior", "Birmingham", "3rd"],
            ["1987", "World Championships", "Rome", "8th"],
            ["1988", "Olympic Games", "Seoul", "8th"],
            ["1989", "European Indoor Championships", "The Hague", "2nd"],
            ["1990", "European Championships", "Split", "6th"],
            ["1991", "World Championships", "Tokyo", "5th"],
            ["1992", "Olympic Games", "Barcelona", "9th"],
            ["1993", "World Championships", "Stuttgart", "5th"],
            ["1993", "World Indoor Championships", "Toronto", "3rd"],
            ["1994", "European Championships", "Helsinki", "4th"],
            ["1995", "World Championships", "Gothenburg", "11th"],
            ["1996", "Olympic Games", "Atlanta", "12th"],
            ["1998", "European Championships", "Budapest", "7th"],
            ["2000", "Olympic Games", "Sydney", "10th"],
        ],
        8449, "Susen Tiedtke"))

    elements = [
        ("Hydrogen", "H", 1, "1.008", 1766, "1"), ("Helium", "He", 2, "4.0026", 1868, "18"),
        ("Lithium", "Li", 3, "6.94", 1817, "1"), ("Beryllium", "Be", 4, "9.0122", 1798, "2"),
        ("Boron", "B", 5, "10.81", 1808, "13"), ("Carbon", "C", 6, "12.011", None, "14"),
        ("Nitrogen", "N", 7, "14.007", 1772, "15"), ("Oxygen", "O", 8, "15.999", 1774, "16"),
        ("Fluorine", "F", 9, "18.998", 1886, "17"), ("Neon", "Ne", 10, "20.180", 1898, "18"),
        ("Sodium", "Na", 11, "22.990", 1807, "1"), ("Magnesium", "Mg", 12, "24.305", 1755, "2"),
        ("Aluminium", "Al", 13, "26.982", 1825, "13"), ("Silicon", "Si", 14, "28.085", 1824, "14"),
        ("Phosphorus", "P", 15, "30.974", 1669, "15"), ("Sulfur", "S", 16, "32.06", None, "16"),
        ("Chlorine", "Cl", 17, "35.45", 1774, "17"), ("Argon", "Ar", 18, "39.948", 1894, "18"),
        ("Potassium", "K", 19, "39.098", 1807, "1"), ("Calcium", "Ca", 20, "40.078", 1808, "2"),
        ("Scandium", "Sc", 21, "44.956", 1879, "3"), ("Titanium", "Ti", 22, "47.867", 1791, "4"),
        ("Vanadium", "V", 23, "50.942", 1801, "5"), ("Chromium", "Cr", 24, "51.996", 1797, "6"),
        ("Manganese", "Mn", 25, "54.938", 1774, "7"), ("Iron", "Fe", 26, "55.845", None, "8"),
        ("Cobalt", "Co", 27, "58.933", 1735, "9"), ("Nickel", "Ni", 28, "58.693", 1751, "10"),
        ("Copper", "Cu", 29, "63.546", None, "11"), ("Zinc", "Zn", 30, "65.38", 1746, "12"),
    ]
    out.append(inst(
        "chemical_elements",
        "the first thirty chemical elements of the periodic table",
        [col("element", True), col("symbol"), col("atomic_number", numeric=True),
         col("atomic_mass", numeric=True), col("discovery_year", numeric=True), col("group", numeric=True)],
        [[n, s, str(z), m, str(y) if y else "ancient", g] for n, s, z, m, y, g in elements],
        21500, "Periodic table"))

    finals = [
        (1930, "Uruguay", "4-2", "Argentina", "Montevideo", 68346),
        (1934, "Italy", "2-1", "Czechoslovakia", "Rome", 55000),
        (1938, "Italy", "4-2", "Hungary", "Paris", 45000),
        (1950, "Uruguay", "2-1", "Brazil", "Rio de Janeiro", 173850),
        (1954, "West Germany", "3-2", "Hungary", "Bern", 62500),
        (1958, "Brazil", "5-2", "Sweden", "Solna", 49737),
        (1962, "Brazil", "3-1", "Czechoslovakia", "Santiago", 68679),
        (1966, "England", "4-2", "West Germany", "London", 96924),
        (1970, "Brazil", "4-1", "Italy", "Mexico City", 107412),
        (1974, "West Germany", "2-1", "Netherlands", "Munich", 78200),
        (1978, "Argentina", "3-1", "Netherlands", "Buenos Aires", 71483),
        (1982, "Italy", "3-1", "West Germany", "Madrid", 90000),
        (1986, "Argentina", "3-2", "West Germany", "Mexico City", 114600),
        (1990, "West Germany", "1-0", "Argentina", "Rome", 73603),
        (1994, "Brazil", "0-0", "Italy", "Pasadena", 94194),
        (1998, "France", "3-0", "Brazil", "Saint-Denis", 80000),
        (2002, "Brazil", "2-0", "Germany", "Yokohama", 69029),
        (2006, "Italy", "1-1", "France", "Berlin", 69000),
        (2010, "Spain", "1-0", "Netherlands", "Johannesburg", 84490),
        (2014, "Germany", "1-0", "Argentina", "Rio de Janeiro", 74738),
        (2018, "France", "4-2", "Croatia", "Moscow", 78011),
    ]
    out.append(inst(
        "world_cup_finals",
        "FIFA World Cup finals played between 1930 and 2018",
        [col("year", True, True), col("winner"), col("score"), col("runner_up"), col("city"),
         col("attendance", numeric=True)],
        [[str(y), w, s, r, c, f"{a:,}"] for y, w, s, r, c, a in finals],
        120000, "List of FIFA World Cup finals"))

    olympics = [
        (1896, "Athens", "Greece", "6 April 1896", 14), (1900, "Paris", "France", "14 May 1900", 24),
        (1904, "St. Louis", "United States", "1 July 1904", 12), (1908, "London", "United Kingdom", "27 April 1908", 22),
        (1912, "Stockholm", "Sweden", "6 July 1912", 28), (1920, "Antwerp", "Belgium", "14 August 1920", 29),
        (1924, "Paris", "France", "5 July 1924", 44), (1928, "Amsterdam", "Netherlands", "28 July 1928", 46),
        (1932, "Los Angeles", "United States", "30 July 1932", 37), (1936, "Berlin", "Germany", "1 August 1936", 49),
        (1948, "London", "United Kingdom", "29 July 1948", 59), (1952, "Helsinki", "Finland", "19 July 1952", 69),
        (1956, "Melbourne", "Australia", "22 November 1956", 72), (1960, "Rome", "Italy", "25 August 1960", 83),
        (1964, "Tokyo", "Japan", "10 October 1964", 93), (1968, "Mexico City", "Mexico", "12 October 1968", 112),
        (1972, "Munich", "West Germany", "26 August 1972", 121), (1976, "Montreal", "Canada", "17 July 1976", 92),
        (1980, "Moscow", "Soviet Union", "19 July 1980", 80), (1984, "Los Angeles", "United States", "28 July 1984", 140),
        (1988, "Seoul", "South Korea", "17 September 1988", 159), (1992, "Barcelona", "Spain", "25 July 1992", 169),
        (1996, "Atlanta", "United States", "19 July 1996", 197), (2000, "Sydney", "Australia", "15 September 2000", 199),
        (2004, "Athens", "Greece", "13 August 2004", 201), (2008, "Beijing", "China", "8 August 2008", 204),
        (2012, "London", "United Kingdom", "27 July 2012", 204), (2016, "Rio de Janeiro", "Brazil", "5 August 2016", 207),
    ]
    out.append(inst(
        "summer_olympics",
        "host cities of the Summer Olympic Games from 1896 to 2016",
        [col("year", True, True), col("city"), col("country"), col("opening_date"), col("nations", numeric=True)],
        [[str(y), c, k, d, str(n)] for y, c, k, d, n in olympics],
        54000, "Summer Olympic Games"))

    presidents = [
        ("George Washington", "April 30, 1789", "Unaffiliated", "Virginia"),
        ("John Adams", "March 4, 1797", "Federalist", "Massachusetts"),
        ("Thomas Jefferson", "March 4, 1801", "Democratic-Republican", "Virginia"),
        ("James Madison", "March 4, 1809", "Democratic-Republican", "Virginia"),
        ("James Monroe", "March 4, 1817", "Democratic-Republican", "Virginia"),
        ("John Quincy Adams", "March 4, 1825", "Democratic-Republican", "Massachusetts"),
        ("Andrew Jackson", "March 4, 1829", "Democratic", "Tennessee"),
        ("Martin Van Buren", "March 4, 1837", "Democratic", "New York"),
        ("William Henry Harrison", "March 4, 1841", "Whig", "Ohio"),
        ("John Tyler", "April 4, 1841", "Whig", "Virginia"),
        ("James K. Polk", "March 4, 1845", "Democratic", "Tennessee"),
        ("Zachary Taylor", "March 4, 1849", "Whig", "Louisiana"),
        ("Millard Fillmore", "July 9, 1850", "Whig", "New York"),
        ("Franklin Pierce", "March 4, 1853", "Democratic", "New Hampshire"),
        ("James Buchanan", "March 4, 1857", "Democratic", "Pennsylvania"),
        ("Abraham Lincoln", "March 4, 1861", "Republican", "Illinois"),
        ("Andrew Johnson", "April 15, 1865", "National Union", "Tennessee"),
        ("Ulysses S. Grant", "March 4, 1869", "Republican", "Illinois"),
        ("Rutherford B. Hayes", "March 4, 1877", "Republican", "Ohio"),
        ("James A. Garfield", "March 4, 1881", "Republican", "Ohio"),
    ]
    out.append(inst(
        "us_presidents",
        "the first twenty presidents of the United States",
        [col("president", True), col("number", numeric=True), col("took_office"), col("party"), col("state")],
        [[p, str(i + 1), t, party, s] for i, (p, t, party, s) in enumerate(presidents)],
        310000, "List of presidents of the United States"))

    countries = [
        ("Russia", "17,098,246", "11.0%", "Moscow", "Europe"), ("Canada", "9,984,670", "6.7%", "Ottawa", "North America"),
        ("China", "9,596,961", "6.4%", "Beijing", "Asia"), ("United States", "9,525,067", "6.4%", "Washington, D.C.", "North America"),
        ("Brazil", "8,515,767", "5.7%", "Brasilia", "South America"), ("Australia", "7,692,024", "5.2%", "Canberra", "Oceania"),
        ("India", "3,287,263", "2.2%", "New Delhi", "Asia"), ("Argentina", "2,780,400", "1.9%", "Buenos Aires", "South America"),
        ("Kazakhstan", "2,724,900", "1.8%", "Astana", "Asia"), ("Algeria", "2,381,741", "1.6%", "Algiers", "Africa"),
        ("DR Congo", "2,344,858", "1.6%", "Kinshasa", "Africa"), ("Saudi Arabia", "2,149,690", "1.4%", "Riyadh", "Asia"),
        ("Mexico", "1,964,375", "1.3%", "Mexico City", "North America"), ("Indonesia", "1,904,569", "1.3%", "Jakarta", "Asia"),
        ("Sudan", "1,861,484", "1.2%", "Khartoum", "Africa"),
    ]
    out.append(inst(
        "largest_countries",
        "the fifteen largest countries by total area",
        [col("country", True), col("area_km2", numeric=True), col("share_of_world", numeric=True), col("capital"),
         col("continent")],
        [list(r) for r in countries],
        47000, "List of countries and dependencies by area"))

    nba = [
        (2000, "Los Angeles Lakers", "Indiana Pacers", "4-2", "Shaquille O'Neal"),
        (2001, "Los Angeles Lakers", "Philadelphia 76ers", "4-1", "Shaquille O'Neal"),
        (2002, "Los Angeles Lakers", "New Jersey Nets", "4-0", "Shaquille O'Neal"),
        (2003, "San Antonio Spurs", "New Jersey Nets", "4-2", "Tim Duncan"),
        (2004, "Detroit Pistons", "Los Angeles Lakers", "4-1", "Chauncey Billups"),
        (2005, "San Antonio Spurs", "Detroit Pistons", "4-3", "Tim Duncan"),
        (2006, "Miami Heat", "Dallas Mavericks", "4-2", "Dwyane Wade"),
        (2007, "San Antonio Spurs", "Cleveland Cavaliers", "4-0", "Tony Parker"),
        (2008, "Boston Celtics", "Los Angeles Lakers", "4-2", "Paul Pierce"),
        (2009, "Los Angeles Lakers", "Orlando Magic", "4-1", "Kobe Bryant"),
        (2010, "Los Angeles Lakers", "Boston Celtics", "4-3", "Kobe Bryant"),
        (2011, "Dallas Mavericks", "Miami Heat", "4-2", "Dirk Nowitzki"),
        (2012, "Miami Heat", "Oklahoma City Thunder", "4-1", "LeBron James"),
        (2013, "Miami Heat", "San Antonio Spurs", "4-3", "LeBron James"),
        (2014, "San Antonio Spurs", "Miami Heat", "4-1", "Kawhi Leonard"),
        (2015, "Golden State Warriors", "Cleveland Cavaliers", "4-2", "Andre Iguodala"),
        (2016, "Cleveland Cavaliers", "Golden State Warriors", "4-3", "LeBron James"),
        (2017, "Golden State Warriors", "Cleveland Cavaliers", "4-1", "Kevin Durant"),
        (2018, "Golden State Warriors", "Cleveland Cavaliers", "4-0", "Kevin Durant"),
        (2019, "Toronto Raptors", "Golden State Warriors", "4-2", "Kawhi Leonard"),
    ]
    out.append(inst(
        "nba_finals",
        "NBA Finals results from 2000 to 2019",
        [col("year", True, True), col("champion"), col("runner_up"), col("result"), col("finals_mvp")],
        [[str(y), c, r, s, m] for y, c, r, s, m in nba],
        26000, "List of NBA champions"))

    buildings = [
        ("Burj Khalifa", "Dubai", "828", "163", "2010"), ("Shanghai Tower", "Shanghai", "632", "128", "2015"),
        ("Abraj Al-Bait Clock Tower", "Mecca", "601", "120", "2012"), ("Ping An Finance Center", "Shenzhen", "599", "115", "2017"),
        ("Lotte World Tower", "Seoul", "554.5", "123", "2017"), ("One World Trade Center", "New York City", "541.3", "94", "2014"),
        ("Guangzhou CTF Finance Centre", "Guangzhou", "530", "111", "2016"), ("Tianjin CTF Finance Centre", "Tianjin", "530", "97", "2019"),
        ("CITIC Tower", "Beijing", "528", "108", "2018"), ("Taipei 101", "Taipei", "508", "101", "2004"),
        ("Shanghai World Financial Center", "Shanghai", "492", "101", "2008"), ("International Commerce Centre", "Hong Kong", "484", "108", "2010"),
    ]
    out.append(inst(
        "tallest_buildings",
        "the tallest completed buildings in the world as of 2019",
        [col("building", True), col("city"), col("height_m", numeric=True), col("floors", numeric=True),
         col("completed", numeric=True)],
        [list(b) for b in buildings],
        15000, "List of tallest buildings"))

    states = [
        ("Delaware", "December 7, 1787", "Dover"), ("Pennsylvania", "December 12, 1787", "Harrisburg"),
        ("New Jersey", "December 18, 1787", "Trenton"), ("Georgia", "January 2, 1788", "Atlanta"),
        ("Connecticut", "January 9, 1788", "Hartford"), ("Massachusetts", "February 6, 1788", "Boston"),
        ("Maryland", "April 28, 1788", "Annapolis"), ("South Carolina", "May 23, 1788", "Columbia"),
        ("New Hampshire", "June 21, 1788", "Concord"), ("Virginia", "June 25, 1788", "Richmond"),
        ("New York", "July 26, 1788", "Albany"), ("North Carolina", "November 21, 1789", "Raleigh"),
        ("Rhode Island", "May 29, 1790", "Providence"), ("Vermont", "March 4, 1791", "Montpelier"),
        ("Kentucky", "June 1, 1792", "Frankfort"), ("Tennessee", "June 1, 1796", "Nashville"),
        ("Ohio", "March 1, 1803", "Columbus"), ("Louisiana", "April 30, 1812", "Baton Rouge"),
    ]
    out.append(inst(
        "us_state_admission",
        "admission dates of the first eighteen US states",
        [col("state", True), col("order", numeric=True), col("admitted"), col("capital")],
        [[s, str(i + 1), d, c] for i, (s, d, c) in enumerate(states)],
        9800, "List of U.S. states by date of admission to the Union"))

    growth = [
        ("Canada", "2018", "2.8%", "2.3%"), ("Canada", "2019", "1.9%", "1.9%"),
        ("France", "2018", "1.9%", "2.1%"), ("France", "2019", "1.8%", "1.3%"),
        ("Germany", "2018", "1.0%", "1.9%"), ("Germany", "2019", "1.1%", "1.4%"),
        ("Italy", "2018", "0.9%", "1.2%"), ("Italy", "2019", "0.5%", "0.6%"),
        ("Japan", "2018", "0.6%", "1.0%"), ("Japan", "2019", "-0.4%", "0.5%"),
        ("United Kingdom", "2018", "1.4%", "2.5%"), ("United Kingdom", "2019", "1.6%", "1.8%"),
        ("United States", "2018", "2.9%", "2.4%"), ("United States", "2019", "2.3%", "1.8%"),
    ]
    out.append(inst(
        "g7_growth",
        "annual GDP growth and inflation of G7 countries in 2018 and 2019",
        [col("country", True), col("year", True, True), col("gdp_growth", numeric=True),
         col("inflation", numeric=True)],
        [list(g) for g in growth],
        3100, "Group of Seven"))

    eurovision = [
        (1990, "Italy", "Toto Cutugno", "Zagreb"), (1991, "Sweden", "Carola", "Rome"),
        (1992, "Ireland", "Linda Martin", "Malmo"), (1993, "Ireland", "Niamh Kavanagh", "Millstreet"),
        (1994, "Ireland", "Paul Harrington and Charlie McGettigan", "Dublin"), (1995, "Norway", "Secret Garden", "Dublin"),
        (1996, "Ireland", "Eimear Quinn", "Oslo"), (1997, "United Kingdom", "Katrina and the Waves", "Dublin"),
        (1998, "Israel", "Dana International", "Birmingham"), (1999, "Sweden", "Charlotte Nilsson", "Jerusalem"),
        (2000, "Denmark", "Olsen Brothers", "Stockholm"), (2001, "Estonia", "Tanel Padar and Dave Benton", "Copenhagen"),
    ]
    out.append(inst(
        "eurovision_winners",
        "winners of the Eurovision Song Contest from 1990 to 2001",
        [col("year", True, True), col("country"), col("performer"), col("host_city")],
        [[str(y), c, p, h] for y, c, p, h in eurovision],
        7200, "List of Eurovision Song Contest winners", split="dev"))
    return {"instances": out}


def curation_inputs():
    def rows(n, f):
        return [f(i) for i in range(n)]

    long_note = "a lengthy free text remark that runs well past the token limit for concise cells"
    candidates = [
        {
            "id": "marathon_winners",
            "source_page": "Berlin Marathon",
            "split": "eval",
            "flags": {},
            "columns": [col("year", True, True), col("winner"), col("time"), col("nationality"), col("notes")],
            "rows": rows(12, lambda i: [str(2000 + i), f"Runner {i}", f"2:0{i % 10}:1{i % 10}",
                                        None if i % 5 == 0 else "Kenya", long_note]),
        },
        {
            "id": "nine_rows",
            "source_page": "Nine Row Page",
            "flags": {},
            "columns": [col("name", True), col("value", numeric=True)],
            "rows": rows(9, lambda i: [f"item {i}", str(i)]),
        },
        {
            "id": "ten_rows",
            "source_page": "Ten Row Page",
            "split": "dev",
            "flags": {},
            "columns": [col("name", True), col("value", numeric=True)],
            "rows": rows(10, lambda i: [f"item {i}", str(i * 10)]),
        },
        {
            "id": "nested_medals",
            "source_page": "Nested Page",
            "flags": {"nested": True},
            "columns": [col("nation", True), col("medals")],
            "rows": rows(30, lambda i: [f"nation {i}", str(i)]),
        },
        {
            "id": "stacked_header",
            "source_page": "Composite Page",
            "flags": {"composite_header": True},
            "columns": [col("club", True), col("season")],
            "rows": rows(15, lambda i: [f"club {i}", str(1990 + i)]),
        },
        {
            "id": "missing_key",
            "source_page": "Missing Key Page",
            "flags": {},
            "columns": [col("album", True), col("released")],
            "rows": rows(11, lambda i: [None if i == 4 else f"album {i}", str(1980 + i)]),
        },
        {
            "id": "one_column_left",
            "source_page": "Sparse Page",
            "flags": {},
            "columns": [col("bridge", True), col("span_m", numeric=True)],
            "rows": rows(10, lambda i: [f"bridge {i}", None if i == 3 else str(400 + i)]),
        },
        {
            "id": "unknown_page",
            "source_page": "Page Nobody Visits",
            "flags": {},
            "columns": [col("peak", True), col("height_m", numeric=True)],
            "rows": rows(10, lambda i: [f"peak {i}", str(8000 + i)]),
        },
    ]
    descriptions = [
        ("marathon_winners", "winners of the Berlin Marathon, men's race, from 2000 to 2011"),
        ("nine_rows", "nine items"),
        ("ten_rows", "ten items with values"),
        ("nested_medals", "medal counts"),
        ("stacked_header", "club seasons"),
        ("missing_key", "albums released between 1980 and 1990"),
        ("one_column_left", "bridge spans"),
        ("unknown_page", "mountain peaks"),
    ]
    months = [f"2023-{m:02d}" for m in range(1, 13)]
    pageviews = {
        "Berlin Marathon": {m: 1000 + 100 * i for i, m in enumerate(months)},
        "Ten Row Page": {m: (None if m == "2023-06" else 300) for m in months},
        "Nine Row Page": {m: 5 for m in months},
        "Nested Page": {m: 5 for m in months},
        "Composite Page": {m: 5 for m in months},
        "Missing Key Page": {m: 5 for m in months},
        "Sparse Page": {m: 5 for m in months},
        "Three Months": {"2023-01": 100, "2023-02": 200, "2023-03": 300},
        "Gap Month": {"2023-01": 100, "2023-02": None, "2023-03": 300},
    }
    return {"candidates": candidates}, descriptions, pageviews


def main():
    ROOT.mkdir(exist_ok=True)
    (ROOT / "benchmark.json").write_text(json.dumps(benchmark(), indent=2, sort_keys=True) + "\n")
    cand, desc, views = curation_inputs()
    cdir = ROOT / "curation"
    cdir.mkdir(exist_ok=True)
    (cdir / "candidates.json").write_text(json.dumps(cand, indent=2) + "\n")
    with open(cdir / "descriptions.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "description"])
        w.writerows(desc)
    (cdir / "pageviews.json").write_text(json.dumps(views, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
